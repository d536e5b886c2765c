/** Application wiring: demographic intake, then the three experiments in
 * order, one stimulus at a time, with queued submission and resume. */

import { ApiClient } from "./api.js";
import { mountRankingBoard, mountRatingForm } from "./dom.js";
import { RatingForm } from "./forms.js";
import { RetryQueue } from "./queue.js";
import { RankingBoard } from "./ranking.js";
import {
  renderDescriptionExperiment,
  renderImageExperiment,
  renderRankingExperiment,
} from "./render.js";
import { SessionStore } from "./session.js";
import { BrowserStore } from "./storage.js";
import type {
  AnswerMap,
  Demographics,
  DescriptionItem,
  ExperimentId,
  ImageItem,
  ItemsPayload,
  RankingItem,
} from "./types.js";
import { DEMOGRAPHIC_OPTIONS } from "./types.js";

const EXPERIMENT_ORDER: ExperimentId[] = ["e1", "e2", "e3"];
const FLUSH_INTERVAL_MS = 5000;

export class SurveyApp {
  constructor(
    private readonly client: ApiClient,
    private readonly session: SessionStore,
    private readonly queue: RetryQueue,
    private readonly root: HTMLElement,
  ) {}

  async start(): Promise<void> {
    window.setInterval(() => void this.flushQueue(), FLUSH_INTERVAL_MS);
    if (!this.session.participantId) {
      this.showDemographics();
    } else {
      await this.runExperiments();
    }
  }

  private async flushQueue(): Promise<void> {
    if (this.queue.size === 0) return;
    const report = await this.queue.flush(this.client);
    for (const body of report.delivered) {
      this.session.markCompleted(body.experiment, body.stimulus_id);
    }
  }

  /** Enqueue first so the answers survive a crash or reload, then try to
   * deliver immediately; 201 and 409 both advance the session. */
  async submit(experiment: ExperimentId, stimulusId: string,
               answers: AnswerMap): Promise<boolean> {
    const participantId = this.session.participantId;
    if (!participantId) throw new Error("no participant token yet");
    this.queue.enqueue({
      participant_id: participantId,
      experiment,
      stimulus_id: stimulusId,
      answers,
    });
    const report = await this.queue.flush(this.client);
    for (const body of report.delivered) {
      this.session.markCompleted(body.experiment, body.stimulus_id);
    }
    const rejected = report.rejected.find(
      (r) => r.body.stimulus_id === stimulusId && r.body.experiment === experiment,
    );
    if (rejected) {
      this.showErrors(rejected.error.fieldErrors.map((e) => `${e.field}: ${e.message}`));
      return false;
    }
    // network failure keeps the item queued; the session still advances and
    // the background flush will deliver it
    this.session.markCompleted(experiment, stimulusId);
    return true;
  }

  private showErrors(messages: string[]): void {
    const box = document.createElement("div");
    box.className = "errors";
    for (const message of messages) {
      const p = document.createElement("p");
      p.textContent = message;
      box.appendChild(p);
    }
    this.root.prepend(box);
  }

  private showDemographics(): void {
    this.root.replaceChildren();
    const form = document.createElement("form");
    form.className = "demographics";
    const draft = this.session.demographicsDraft;
    for (const [field, options] of Object.entries(DEMOGRAPHIC_OPTIONS)) {
      const label = document.createElement("label");
      label.textContent = field.replace(/_/g, " ");
      const select = document.createElement("select");
      select.name = field;
      const blank = document.createElement("option");
      blank.value = "";
      blank.textContent = "choose...";
      select.appendChild(blank);
      for (const option of options) {
        const node = document.createElement("option");
        node.value = String(option);
        node.textContent = String(option);
        node.selected = String(draft[field as keyof Demographics] ?? "") === String(option);
        select.appendChild(node);
      }
      select.addEventListener("change", () => {
        const value = field === "fashion_interest" ? Number(select.value) : select.value;
        this.session.updateDemographicsDraft({ [field]: value });
      });
      label.appendChild(select);
      form.appendChild(label);
    }
    const submit = document.createElement("button");
    submit.type = "button";
    submit.textContent = "Begin";
    submit.addEventListener("click", () => void this.registerAndBegin());
    form.appendChild(submit);
    this.root.appendChild(form);
  }

  private async registerAndBegin(): Promise<void> {
    const draft = this.session.demographicsDraft;
    const missing = Object.keys(DEMOGRAPHIC_OPTIONS).filter(
      (field) => draft[field as keyof Demographics] === undefined ||
        draft[field as keyof Demographics] === "",
    );
    if (missing.length > 0) {
      this.showErrors(missing.map((f) => `${f}: required`));
      return;
    }
    const token = await this.client.registerParticipant(draft as Demographics);
    this.session.setParticipant(token);
    await this.runExperiments();
  }

  private async runExperiments(): Promise<void> {
    for (const experiment of EXPERIMENT_ORDER) {
      const payload = await this.client.experimentItems(experiment);
      while (this.session.progressOf(experiment) < payload.items.length) {
        const index = this.session.progressOf(experiment);
        const item = payload.items[index]!;
        const done = await this.presentStimulus(payload, index);
        if (done) {
          this.session.advance(experiment, index + 1);
        } else {
          return; // validation failed locally; stay on this stimulus
        }
        void item;
      }
    }
    this.root.replaceChildren();
    const thanks = document.createElement("p");
    thanks.className = "thanks";
    thanks.textContent = "All experiments completed. Thank you!";
    this.root.appendChild(thanks);
  }

  /** Render one stimulus and resolve once it was submitted (or queued). */
  private presentStimulus(payload: ItemsPayload, index: number): Promise<boolean> {
    const experiment = payload.experiment;
    const item = payload.items[index]!;
    return new Promise((resolve) => {
      if (experiment === "e3") {
        const ranking = item as RankingItem;
        const board = new RankingBoard(ranking.cards);
        const rerender = () => {
          const view = renderRankingExperiment(payload.instrument, ranking, board);
          view.pool = view.pool.map((c) => ({ ...c, imageUrl: this.client.imageUrl(c.imageUrl) }));
          view.slots = view.slots.map((s) => ({
            ...s,
            imageUrl: s.imageUrl ? this.client.imageUrl(s.imageUrl) : null,
          }));
          const node = mountRankingBoard(view, {
            onAssign: (cardId, place) => { board.assign(cardId, place); rerender(); },
            onAssignNext: (cardId) => { board.assignNext(cardId); rerender(); },
            onUnassign: (place) => { board.unassign(place); rerender(); },
            onSubmit: () => {
              void this.submit(experiment, ranking.stimulus_id,
                               { e3_rank: board.toAnswer() }).then(resolve);
            },
          });
          this.root.replaceChildren(node);
        };
        rerender();
        return;
      }

      const form = new RatingForm(payload.instrument);
      const rerender = () => {
        const view = experiment === "e1"
          ? renderImageExperiment(payload.instrument, item as ImageItem, form)
          : renderDescriptionExperiment(payload.instrument, item as DescriptionItem, form);
        if (view.stimulus.kind === "image") {
          view.stimulus.imageUrl = this.client.imageUrl(view.stimulus.imageUrl);
        }
        const node = mountRatingForm(view, {
          onLikert: (id, value) => { form.setLikert(id, value); rerender(); },
          onYesNo: (id, value) => { form.setYesNo(id, value); rerender(); },
          onSubmit: () => {
            if (!form.complete) {
              this.showErrors(form.validate().map((e) => `${e.field}: ${e.message}`));
              return;
            }
            void this.submit(experiment, (item as ImageItem).stimulus_id,
                             form.toAnswers()).then(resolve);
          },
        });
        this.root.replaceChildren(node);
      };
      rerender();
    });
  }
}

export function bootstrap(): void {
  const base =
    window.localStorage.getItem("outfitgen.api") ?? window.location.origin;
  const store = new BrowserStore();
  const app = new SurveyApp(
    new ApiClient(base),
    new SessionStore(store),
    new RetryQueue(store),
    document.getElementById("app") ?? document.body,
  );
  void app.start();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  bootstrap();
}
