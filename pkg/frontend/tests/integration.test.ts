/** End-to-end test against the real survey service.
 *
 * Generates a small record set with the backend CLI, boots the service, and
 * drives it with the same client/form/board code the browser uses. Skippable
 * with OUTFITGEN_SKIP_INTEGRATION=1 for environments without the backend.
 */

import { execSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { RatingForm } from "../src/forms.js";
import { RetryQueue } from "../src/queue.js";
import { RankingBoard } from "../src/ranking.js";
import { displayedQuestionTexts, renderImageExperiment } from "../src/render.js";
import { MemoryStore } from "../src/storage.js";
import type { Demographics, ImageItem, RankingItem } from "../src/types.js";

const SKIP = process.env.OUTFITGEN_SKIP_INTEGRATION === "1";
const PORT = 8900 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

const DEMOGRAPHICS: Demographics = {
  age_range: "25-34",
  gender: "non-binary",
  occupation: "student",
  art_related: "no",
  english_level: "native/fluent",
  prior_ai_survey: "yes",
  prior_fashion_survey: "no",
  fashion_interest: 4,
};

let server: ChildProcess | null = null;
let client: ApiClient;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/api/experiments/e1/items`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error("survey service did not come up");
}

describe.skipIf(SKIP)("against the live survey service", () => {
  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "survey-ui-"));
    const config = join(dir, "config.json");
    writeFileSync(config, JSON.stringify({
      output_dir: join(dir, "run"),
      admin_token: "integration-token",
    }));
    execSync(
      `outfitgen generate --config ${config} --style gothic --occasion wedding`,
      { stdio: "pipe" },
    );
    server = spawn("outfitgen",
      ["serve", "--config", config, "--port", String(PORT)],
      { stdio: "ignore" });
    await waitForServer();
    client = new ApiClient(BASE);
  }, 60_000);

  afterAll(() => {
    server?.kill();
  });

  it("registers a participant and gets an opaque token", async () => {
    const token = await client.registerParticipant(DEMOGRAPHICS);
    expect(token).toMatch(/^[0-9a-f]{32}$/);
  });

  it("rejects bad demographics with field errors", async () => {
    const bad = { ...DEMOGRAPHICS, age_range: "toddler" };
    await expect(client.registerParticipant(bad)).rejects.toMatchObject({
      status: 422,
    });
  });

  it("renders exactly the server's question strings", async () => {
    const payload = await client.experimentItems("e1");
    expect(payload.instrument.questions).toHaveLength(8);
    const form = new RatingForm(payload.instrument);
    form.setYesNo("e1_q7", "yes");
    const view = renderImageExperiment(
      payload.instrument, payload.items[0] as ImageItem, form);
    expect(displayedQuestionTexts(view)).toEqual(
      payload.instrument.questions.map((q) => q.text));
  });

  it("serves blinded items whose images are fetchable PNGs", async () => {
    const payload = await client.experimentItems("e1");
    expect(JSON.stringify(payload.items)).not.toContain("strategy");
    const item = payload.items[0] as ImageItem;
    const image = await fetch(client.imageUrl(item.image_url));
    expect(image.status).toBe(200);
    expect(image.headers.get("content-type")).toBe("image/png");
  });

  it("accepts a complete E1 form and rejects an induced arity violation", async () => {
    const token = await client.registerParticipant(DEMOGRAPHICS);
    const payload = await client.experimentItems("e1");
    const item = payload.items[0] as ImageItem;
    const form = new RatingForm(payload.instrument);
    for (let i = 1; i <= 6; i += 1) form.setLikert(`e1_q${i}`, 4);
    form.setYesNo("e1_q7", "yes");
    form.setYesNo("e1_q8", "no");

    // induced violation: drop one answer key entirely
    const truncated = { ...form.toAnswers() };
    delete truncated.e1_q5;
    const failure = await client.submitResponse({
      participant_id: token, experiment: "e1",
      stimulus_id: item.stimulus_id, answers: truncated,
    }).catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(422);
    expect((failure as ApiError).fieldErrors.map((f) => f.field))
      .toContain("answers.e1_q5");

    const outcome = await client.submitResponse({
      participant_id: token, experiment: "e1",
      stimulus_id: item.stimulus_id, answers: form.toAnswers(),
    });
    expect(outcome).toBe("stored");

    const duplicate = await client.submitResponse({
      participant_id: token, experiment: "e1",
      stimulus_id: item.stimulus_id, answers: form.toAnswers(),
    });
    expect(duplicate).toBe("duplicate");
  });

  it("accepts a complete E2 form and rejects a short one", async () => {
    const token = await client.registerParticipant(DEMOGRAPHICS);
    const payload = await client.experimentItems("e2");
    expect(payload.instrument.questions).toHaveLength(11);
    const form = new RatingForm(payload.instrument);
    for (let i = 1; i <= 11; i += 1) form.setLikert(`e2_q${i}`, ((i * 2) % 5) + 1);
    const item = payload.items[0] as { stimulus_id: string };

    const short = { ...form.toAnswers() };
    delete short.e2_q11;
    const failure = await client.submitResponse({
      participant_id: token, experiment: "e2",
      stimulus_id: item.stimulus_id, answers: short,
    }).catch((e) => e);
    expect((failure as ApiError).status).toBe(422);

    expect(await client.submitResponse({
      participant_id: token, experiment: "e2",
      stimulus_id: item.stimulus_id, answers: form.toAnswers(),
    })).toBe("stored");
  });

  it("submits a full E3 ranking through the board", async () => {
    const token = await client.registerParticipant(DEMOGRAPHICS);
    const payload = await client.experimentItems("e3");
    expect(payload.items.length).toBeGreaterThan(0);
    const item = payload.items[0] as RankingItem;
    const board = new RankingBoard(item.cards);

    // partial permutation is rejected client-side before any network call
    expect(() => board.toAnswer()).toThrow();

    item.cards.forEach((card, i) => board.assign(card.card_id, 4 - i));
    expect(await client.submitResponse({
      participant_id: token, experiment: "e3",
      stimulus_id: item.stimulus_id, answers: { e3_rank: board.toAnswer() },
    })).toBe("stored");
  });

  it("delivers queued submissions like a reconnecting client", async () => {
    const token = await client.registerParticipant(DEMOGRAPHICS);
    const payload = await client.experimentItems("e1");
    const item = payload.items[1] as ImageItem;
    const form = new RatingForm(payload.instrument);
    for (let i = 1; i <= 6; i += 1) form.setLikert(`e1_q${i}`, 2);
    form.setYesNo("e1_q7", "no");

    const store = new MemoryStore();
    const queue = new RetryQueue(store);
    queue.enqueue({
      participant_id: token, experiment: "e1",
      stimulus_id: item.stimulus_id, answers: form.toAnswers(),
    });

    // first flush happens "offline"
    const offlineClient = new ApiClient(BASE, async () => {
      throw new TypeError("network down");
    });
    const offline = await queue.flush(offlineClient);
    expect(offline.offline).toBe(true);
    expect(queue.size).toBe(1);

    // the queue survives a reload, then the real network drains it
    const revived = new RetryQueue(store);
    const report = await revived.flush(client);
    expect(report.delivered).toHaveLength(1);
    expect(revived.size).toBe(0);
  });
});
