import { describe, expect, it } from "vitest";

import { SessionStore } from "../../src/session.js";
import { MemoryStore } from "../../src/storage.js";

describe("SessionStore", () => {
  it("persists the participant token across reloads", () => {
    const store = new MemoryStore();
    new SessionStore(store).setParticipant("tok-123");
    expect(new SessionStore(store).participantId).toBe("tok-123");
  });

  it("refuses to swap participants mid-session", () => {
    const session = new SessionStore(new MemoryStore());
    session.setParticipant("tok-1");
    expect(() => session.setParticipant("tok-2")).toThrow();
    session.setParticipant("tok-1"); // idempotent re-set is fine
  });

  it("progress is monotone", () => {
    const store = new MemoryStore();
    const session = new SessionStore(store);
    session.advance("e1", 3);
    session.advance("e1", 1); // backwards: ignored
    expect(session.progressOf("e1")).toBe(3);
    expect(new SessionStore(store).progressOf("e1")).toBe(3);
    expect(session.progressOf("e2")).toBe(0);
  });

  it("tracks completed stimuli uniquely per experiment", () => {
    const session = new SessionStore(new MemoryStore());
    session.markCompleted("e1", "stim-a");
    session.markCompleted("e1", "stim-a");
    expect(session.isCompleted("e1", "stim-a")).toBe(true);
    expect(session.isCompleted("e2", "stim-a")).toBe(false);
  });

  it("keeps a demographics draft across reloads", () => {
    const store = new MemoryStore();
    const session = new SessionStore(store);
    session.updateDemographicsDraft({ age_range: "25-34" });
    session.updateDemographicsDraft({ gender: "female" });
    expect(new SessionStore(store).demographicsDraft).toEqual({
      age_range: "25-34",
      gender: "female",
    });
  });
});
