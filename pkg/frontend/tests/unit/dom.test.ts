// @vitest-environment happy-dom
import { describe, expect, it, vi } from "vitest";

import { mountRankingBoard, mountRatingForm } from "../../src/dom.js";
import { RatingForm } from "../../src/forms.js";
import { RankingBoard } from "../../src/ranking.js";
import {
  renderImageExperiment,
  renderRankingExperiment,
} from "../../src/render.js";
import { fiveCards, imageInstrument, rankingInstrument } from "./fixtures.js";

const noopRating = { onLikert: () => {}, onYesNo: () => {}, onSubmit: () => {} };

describe("rating form DOM", () => {
  const item = { stimulus_id: "r1", image_url: "/api/records/r1/image" };

  it("mounts one radio group per visible question", () => {
    const view = renderImageExperiment(imageInstrument(), item, new RatingForm(imageInstrument()));
    const node = mountRatingForm(view, noopRating);
    const fieldsets = node.querySelectorAll("fieldset.question");
    expect(fieldsets).toHaveLength(7); // 6 likert + gate; follow-up hidden
    expect(node.querySelectorAll(".question-likert input[type=radio]")).toHaveLength(30);
    expect(node.querySelectorAll(".question-yes_no input[type=radio]")).toHaveLength(2);
  });

  it("renders the server question text verbatim in legends", () => {
    const instrument = imageInstrument();
    const view = renderImageExperiment(instrument, item, new RatingForm(instrument));
    const node = mountRatingForm(view, noopRating);
    const legends = [...node.querySelectorAll("legend")].map((l) => l.textContent);
    expect(legends).toEqual(instrument.questions.slice(0, 7).map((q) => q.text));
  });

  it("disables submit while incomplete and fires handlers on change", () => {
    const onLikert = vi.fn();
    const view = renderImageExperiment(imageInstrument(), item, new RatingForm(imageInstrument()));
    const node = mountRatingForm(view, { ...noopRating, onLikert });
    const submit = node.querySelector("button.submit") as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
    const radio = node.querySelector(
      "fieldset[data-question-id=e1_q1] input[value='4']",
    ) as HTMLInputElement;
    radio.checked = true;
    radio.dispatchEvent(new Event("change"));
    expect(onLikert).toHaveBeenCalledWith("e1_q1", 4);
  });

  it("enables submit when the form is complete", () => {
    const form = new RatingForm(imageInstrument());
    for (let i = 1; i <= 6; i += 1) form.setLikert(`e1_q${i}`, 3);
    form.setYesNo("e1_q7", "no");
    const view = renderImageExperiment(imageInstrument(), item, form);
    const node = mountRatingForm(view, noopRating);
    expect((node.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(false);
  });
});

describe("ranking board DOM", () => {
  const item = { stimulus_id: "set-1", cards: fiveCards() };

  it("mounts five draggable cards and five slots with submit disabled", () => {
    const view = renderRankingExperiment(rankingInstrument(), item, new RankingBoard(item.cards));
    const node = mountRankingBoard(view, {
      onAssign: () => {}, onAssignNext: () => {}, onUnassign: () => {}, onSubmit: () => {},
    });
    const cards = node.querySelectorAll(".rank-card");
    expect(cards).toHaveLength(5);
    expect([...cards].every((c) => (c as HTMLElement).draggable)).toBe(true);
    expect(node.querySelectorAll(".rank-slot")).toHaveLength(5);
    expect((node.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(true);
  });

  it("click on a pool card requests next-place assignment", () => {
    const onAssignNext = vi.fn();
    const view = renderRankingExperiment(rankingInstrument(), item, new RankingBoard(item.cards));
    const node = mountRankingBoard(view, {
      onAssign: () => {}, onAssignNext, onUnassign: () => {}, onSubmit: () => {},
    });
    (node.querySelector(".rank-card") as HTMLElement).click();
    expect(onAssignNext).toHaveBeenCalledWith(item.cards[0]!.card_id);
  });

  it("enables submit for a full permutation", () => {
    const board = new RankingBoard(item.cards);
    item.cards.forEach((c, i) => board.assign(c.card_id, i));
    const view = renderRankingExperiment(rankingInstrument(), item, board);
    const node = mountRankingBoard(view, {
      onAssign: () => {}, onAssignNext: () => {}, onUnassign: () => {}, onSubmit: () => {},
    });
    expect((node.querySelector("button.submit") as HTMLButtonElement).disabled).toBe(false);
  });
});
