import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, NetworkError } from "../../src/api.js";
import { RetryQueue } from "../../src/queue.js";
import { MemoryStore } from "../../src/storage.js";
import type { SubmissionBody } from "../../src/types.js";

function submission(stimulus: string): SubmissionBody {
  return {
    participant_id: "p-1",
    experiment: "e1",
    stimulus_id: stimulus,
    answers: { e1_q1: 3 },
  };
}

/** An ApiClient whose network is a scripted list of outcomes. */
function scriptedClient(outcomes: ("ok" | "dup" | "net" | "invalid")[]): ApiClient {
  const script = [...outcomes];
  return new ApiClient("http://svc.test", async (url) => {
    if (!url.endsWith("/api/responses")) throw new Error("unexpected call");
    const next = script.shift() ?? "ok";
    if (next === "net") throw new TypeError("fetch failed");
    if (next === "ok") return new Response("{}", { status: 201 });
    if (next === "dup") return new Response("{}", { status: 409 });
    return new Response(
      JSON.stringify({ errors: [{ field: "answers.e1_q2", message: "missing answer" }] }),
      { status: 422 },
    );
  });
}

describe("RetryQueue", () => {
  it("persists enqueued answers across a reload", () => {
    const store = new MemoryStore();
    new RetryQueue(store).enqueue(submission("s1"));
    const reloaded = new RetryQueue(store);
    expect(reloaded.size).toBe(1);
    expect(reloaded.pending()[0]!.stimulus_id).toBe("s1");
  });

  it("drops items on 201 and keeps them on network failure", async () => {
    const store = new MemoryStore();
    const queue = new RetryQueue(store);
    queue.enqueue(submission("s1"));
    queue.enqueue(submission("s2"));

    const firstTry = await queue.flush(scriptedClient(["ok", "net"]));
    expect(firstTry.delivered.map((b) => b.stimulus_id)).toEqual(["s1"]);
    expect(firstTry.offline).toBe(true);
    expect(queue.size).toBe(1);

    // still there after a reload, then delivered once the network is back
    const reloaded = new RetryQueue(store);
    const secondTry = await reloaded.flush(scriptedClient(["ok"]));
    expect(secondTry.delivered.map((b) => b.stimulus_id)).toEqual(["s2"]);
    expect(reloaded.size).toBe(0);
  });

  it("treats 409 as delivered so the session advances without a duplicate", async () => {
    const queue = new RetryQueue(new MemoryStore());
    queue.enqueue(submission("s1"));
    const report = await queue.flush(scriptedClient(["dup"]));
    expect(report.delivered).toHaveLength(1);
    expect(queue.size).toBe(0);
  });

  it("drops validation failures and surfaces the field errors", async () => {
    const queue = new RetryQueue(new MemoryStore());
    queue.enqueue(submission("s1"));
    const report = await queue.flush(scriptedClient(["invalid"]));
    expect(report.delivered).toHaveLength(0);
    expect(report.rejected).toHaveLength(1);
    expect(report.rejected[0]!.error).toBeInstanceOf(ApiError);
    expect(report.rejected[0]!.error.status).toBe(422);
    expect(report.rejected[0]!.error.fieldErrors[0]!.field).toBe("answers.e1_q2");
    expect(queue.size).toBe(0);
  });

  it("stops at the first offline item and preserves order", async () => {
    const queue = new RetryQueue(new MemoryStore());
    for (const s of ["s1", "s2", "s3"]) queue.enqueue(submission(s));
    const report = await queue.flush(scriptedClient(["ok", "net"]));
    expect(report.delivered.map((b) => b.stimulus_id)).toEqual(["s1"]);
    expect(queue.pending().map((b) => b.stimulus_id)).toEqual(["s2", "s3"]);
  });
});

describe("ApiClient error mapping", () => {
  it("wraps fetch rejections in NetworkError", async () => {
    const client = new ApiClient("http://svc.test", async () => {
      throw new TypeError("fetch failed");
    });
    await expect(client.submitResponse(submission("s1"))).rejects.toBeInstanceOf(
      NetworkError,
    );
  });
});
