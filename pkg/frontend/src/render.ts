/** View models for the three experiment screens.
 *
 * Renderers consume only the server payloads (instrument + stimulus) and the
 * form/board state; every question string in a view is the server's string,
 * and no strategy or method name exists anywhere in these structures, so
 * blinding cannot be broken at the presentation layer.
 */

import type { RatingForm } from "./forms.js";
import type { RankingBoard } from "./ranking.js";
import type {
  DescriptionItem,
  ImageItem,
  Instrument,
  RankingItem,
} from "./types.js";

export interface LikertRowView {
  kind: "likert";
  questionId: string;
  text: string;
  value: number | null;
  /** anchor captions shown at the extremes only */
  anchors: { low: string; high: string };
}

export interface YesNoRowView {
  kind: "yes_no";
  questionId: string;
  text: string;
  value: "yes" | "no" | null;
}

export type QuestionRowView = LikertRowView | YesNoRowView;

export interface RatingFormView {
  experiment: string;
  stimulus:
    | { kind: "image"; stimulusId: string; imageUrl: string }
    | { kind: "description"; stimulusId: string; text: string };
  rows: QuestionRowView[];
  submitEnabled: boolean;
}

const LIKERT_ANCHORS = { low: "not at all", high: "extremely" };

function questionRows(instrument: Instrument, form: RatingForm): QuestionRowView[] {
  const rows: QuestionRowView[] = [];
  for (const question of instrument.questions) {
    if (!form.isVisible(question.id)) continue;
    if (question.answer_kind === "likert_1_5") {
      rows.push({
        kind: "likert",
        questionId: question.id,
        text: question.text,
        value: (form.valueOf(question.id) as number | null) ?? null,
        anchors: LIKERT_ANCHORS,
      });
    } else if (question.answer_kind === "yes_no") {
      rows.push({
        kind: "yes_no",
        questionId: question.id,
        text: question.text,
        value: (form.valueOf(question.id) as "yes" | "no" | null) ?? null,
      });
    }
  }
  return rows;
}

export function renderImageExperiment(
  instrument: Instrument,
  item: ImageItem,
  form: RatingForm,
): RatingFormView {
  return {
    experiment: instrument.experiment,
    stimulus: { kind: "image", stimulusId: item.stimulus_id, imageUrl: item.image_url },
    rows: questionRows(instrument, form),
    submitEnabled: form.complete,
  };
}

export function renderDescriptionExperiment(
  instrument: Instrument,
  item: DescriptionItem,
  form: RatingForm,
): RatingFormView {
  return {
    experiment: instrument.experiment,
    stimulus: {
      kind: "description",
      stimulusId: item.stimulus_id,
      text: item.description,
    },
    rows: questionRows(instrument, form),
    submitEnabled: form.complete,
  };
}

export interface RankingSlotView {
  place: number;
  label: string;
  cardId: string | null;
  imageUrl: string | null;
}

export interface RankingView {
  experiment: string;
  stimulusId: string;
  prompt: string;
  pool: { cardId: string; imageUrl: string }[];
  slots: RankingSlotView[];
  submitEnabled: boolean;
}

const PLACE_LABELS = ["1st", "2nd", "3rd", "4th", "5th"];

export function renderRankingExperiment(
  instrument: Instrument,
  item: RankingItem,
  board: RankingBoard,
): RankingView {
  const urls = new Map(item.cards.map((c) => [c.card_id, c.image_url]));
  return {
    experiment: instrument.experiment,
    stimulusId: item.stimulus_id,
    prompt: instrument.questions[0]?.text ?? "",
    pool: board.pool().map((c) => ({ cardId: c.card_id, imageUrl: c.image_url })),
    slots: PLACE_LABELS.map((label, place) => {
      const cardId = board.cardAt(place);
      return {
        place,
        label,
        cardId,
        imageUrl: cardId ? urls.get(cardId) ?? null : null,
      };
    }),
    submitEnabled: board.complete,
  };
}

/** Every question string a view displays, for snapshot checks against the
 * server instrument. */
export function displayedQuestionTexts(view: RatingFormView): string[] {
  return view.rows.map((row) => row.text);
}
