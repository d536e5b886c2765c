/** Materializes view models into DOM nodes and wires user events back into
 * the state objects. Deliberately dumb: all logic lives in forms/ranking. */

import type { RatingFormView, RankingView } from "./render.js";

export interface RatingHandlers {
  onLikert(questionId: string, value: number): void;
  onYesNo(questionId: string, value: "yes" | "no"): void;
  onSubmit(): void;
}

export interface RankingHandlers {
  onAssign(cardId: string, place: number): void;
  onAssignNext(cardId: string): void;
  onUnassign(place: number): void;
  onSubmit(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function likertScale(
  questionId: string,
  value: number | null,
  anchors: { low: string; high: string },
  onPick: (v: number) => void,
): HTMLElement {
  const wrap = el("div", "likert-scale");
  wrap.appendChild(el("span", "anchor anchor-low", anchors.low));
  for (let v = 1; v <= 5; v += 1) {
    const label = el("label", "likert-point");
    const input = el("input");
    input.type = "radio";
    input.name = questionId;
    input.value = String(v);
    input.checked = value === v;
    input.addEventListener("change", () => onPick(v));
    label.appendChild(input);
    label.appendChild(el("span", undefined, String(v)));
    wrap.appendChild(label);
  }
  wrap.appendChild(el("span", "anchor anchor-high", anchors.high));
  return wrap;
}

export function mountRatingForm(
  view: RatingFormView,
  handlers: RatingHandlers,
): HTMLElement {
  const root = el("form", `experiment experiment-${view.experiment}`);
  root.addEventListener("submit", (event) => event.preventDefault());

  if (view.stimulus.kind === "image") {
    const img = el("img", "stimulus-image");
    img.src = view.stimulus.imageUrl;
    img.alt = "generated outfit";
    root.appendChild(img);
  } else {
    root.appendChild(el("blockquote", "stimulus-description", view.stimulus.text));
  }

  for (const row of view.rows) {
    const field = el("fieldset", `question question-${row.kind}`);
    field.dataset.questionId = row.questionId;
    field.appendChild(el("legend", "question-text", row.text));
    if (row.kind === "likert") {
      field.appendChild(
        likertScale(row.questionId, row.value, row.anchors, (v) =>
          handlers.onLikert(row.questionId, v),
        ),
      );
    } else {
      for (const option of ["yes", "no"] as const) {
        const label = el("label", "yesno-option");
        const input = el("input");
        input.type = "radio";
        input.name = row.questionId;
        input.value = option;
        input.checked = row.value === option;
        input.addEventListener("change", () => handlers.onYesNo(row.questionId, option));
        label.appendChild(input);
        label.appendChild(el("span", undefined, option));
        field.appendChild(label);
      }
    }
    root.appendChild(field);
  }

  const submit = el("button", "submit", "Submit");
  submit.type = "button";
  submit.disabled = !view.submitEnabled;
  submit.addEventListener("click", () => handlers.onSubmit());
  root.appendChild(submit);
  return root;
}

export function mountRankingBoard(
  view: RankingView,
  handlers: RankingHandlers,
): HTMLElement {
  const root = el("section", "experiment experiment-e3");
  root.appendChild(el("p", "ranking-prompt", view.prompt));

  const pool = el("div", "card-pool");
  for (const card of view.pool) {
    const node = el("figure", "rank-card");
    node.dataset.cardId = card.cardId;
    node.draggable = true;
    const img = el("img");
    img.src = card.imageUrl;
    img.alt = "outfit candidate";
    node.appendChild(img);
    node.addEventListener("dragstart", (event) => {
      event.dataTransfer?.setData("text/plain", card.cardId);
    });
    node.addEventListener("click", () => handlers.onAssignNext(card.cardId));
    pool.appendChild(node);
  }
  root.appendChild(pool);

  const slots = el("ol", "rank-slots");
  for (const slot of view.slots) {
    const li = el("li", slot.cardId ? "rank-slot filled" : "rank-slot empty");
    li.dataset.place = String(slot.place);
    li.appendChild(el("span", "place-label", slot.label));
    if (slot.cardId && slot.imageUrl) {
      const img = el("img");
      img.src = slot.imageUrl;
      img.alt = `outfit ranked ${slot.label}`;
      li.appendChild(img);
      li.addEventListener("click", () => handlers.onUnassign(slot.place));
    }
    li.addEventListener("dragover", (event) => event.preventDefault());
    li.addEventListener("drop", (event) => {
      event.preventDefault();
      const cardId = event.dataTransfer?.getData("text/plain");
      if (cardId) handlers.onAssign(cardId, slot.place);
    });
    slots.appendChild(li);
  }
  root.appendChild(slots);

  const submit = el("button", "submit", "Submit ranking");
  submit.type = "button";
  submit.disabled = !view.submitEnabled;
  submit.addEventListener("click", () => handlers.onSubmit());
  root.appendChild(submit);
  return root;
}
