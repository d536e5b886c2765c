/** Wire types mirroring the survey service payloads. */

export type ExperimentId = "e1" | "e2" | "e3";

export type AnswerKind = "likert_1_5" | "yes_no" | "rank_permutation_5";

export interface Question {
  id: string;
  text: string;
  answer_kind: AnswerKind;
}

export interface Instrument {
  experiment: ExperimentId;
  questions: Question[];
}

export interface ImageItem {
  stimulus_id: string;
  image_url: string;
}

export interface DescriptionItem {
  stimulus_id: string;
  description: string;
}

export interface RankCard {
  card_id: string;
  image_url: string;
}

export interface RankingItem {
  stimulus_id: string;
  cards: RankCard[];
}

export type StimulusItem = ImageItem | DescriptionItem | RankingItem;

export interface ItemsPayload {
  experiment: ExperimentId;
  instrument: Instrument;
  items: StimulusItem[];
}

/** Value of one answered question; null only for the gated yes/no question. */
export type AnswerValue = number | string | string[] | null;

export type AnswerMap = Record<string, AnswerValue>;

export interface SubmissionBody {
  participant_id: string;
  experiment: ExperimentId;
  stimulus_id: string;
  answers: AnswerMap;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface Demographics {
  age_range: string;
  gender: string;
  occupation: string;
  art_related: string;
  english_level: string;
  prior_ai_survey: string;
  prior_fashion_survey: string;
  fashion_interest: number;
}

export const DEMOGRAPHIC_OPTIONS: Record<keyof Demographics, readonly (string | number)[]> = {
  age_range: ["18-24", "25-34", "35-44", "45-54", "55+"],
  gender: ["female", "male", "non-binary", "prefer_not_to_say"],
  occupation: ["student", "full-time employed", "part-time employed",
    "self-employed", "unemployed", "retired", "other"],
  art_related: ["yes", "no"],
  english_level: ["beginner", "intermediate", "proficient", "native/fluent"],
  prior_ai_survey: ["yes", "no"],
  prior_fashion_survey: ["yes", "no"],
  fashion_interest: [1, 2, 3, 4, 5],
};
