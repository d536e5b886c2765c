/** Instrument fixtures mirroring the server payload shape. The strings are
 * deliberately arbitrary: tests must prove the UI echoes whatever the server
 * sends rather than recognizing known wording. */

import type { Instrument, RankCard } from "../../src/types.js";

export function imageInstrument(): Instrument {
  const questions = [];
  for (let i = 1; i <= 6; i += 1) {
    questions.push({
      id: `e1_q${i}`,
      text: `server-sent likert question ${i}?`,
      answer_kind: "likert_1_5" as const,
    });
  }
  questions.push({
    id: "e1_q7",
    text: "server-sent gate question?",
    answer_kind: "yes_no" as const,
  });
  questions.push({
    id: "e1_q8",
    text: "server-sent follow-up shown only after a yes?",
    answer_kind: "yes_no" as const,
  });
  return { experiment: "e1", questions };
}

export function descriptionInstrument(): Instrument {
  return {
    experiment: "e2",
    questions: Array.from({ length: 11 }, (_, i) => ({
      id: `e2_q${i + 1}`,
      text: `server-sent description question ${i + 1}?`,
      answer_kind: "likert_1_5" as const,
    })),
  };
}

export function rankingInstrument(): Instrument {
  return {
    experiment: "e3",
    questions: [{
      id: "e3_rank",
      text: "server-sent ranking prompt",
      answer_kind: "rank_permutation_5" as const,
    }],
  };
}

export function fiveCards(): RankCard[] {
  return ["a1b2", "c3d4", "e5f6", "a7b8", "c9d0"].map((id) => ({
    card_id: id,
    image_url: `/api/records/${id}/image`,
  }));
}
