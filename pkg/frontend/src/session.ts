/** Participant session: token, demographics draft, per-experiment progress.
 *
 * Progress is monotone (an index can only move forward) and everything is
 * persisted on every mutation so a reload resumes exactly where the rater
 * left off.
 */

import type { KeyValueStore } from "./storage.js";
import type { Demographics, ExperimentId } from "./types.js";

interface PersistedSession {
  participantId: string | null;
  demographicsDraft: Partial<Demographics>;
  progress: Record<ExperimentId, number>;
  completed: string[];
}

const EMPTY: PersistedSession = {
  participantId: null,
  demographicsDraft: {},
  progress: { e1: 0, e2: 0, e3: 0 },
  completed: [],
};

export class SessionStore {
  private state: PersistedSession;

  constructor(
    private readonly store: KeyValueStore,
    private readonly key = "outfitgen.session",
  ) {
    const raw = store.get(key);
    this.state = raw ? { ...EMPTY, ...(JSON.parse(raw) as PersistedSession) } : { ...EMPTY };
  }

  private persist(): void {
    this.store.set(this.key, JSON.stringify(this.state));
  }

  get participantId(): string | null {
    return this.state.participantId;
  }

  setParticipant(token: string): void {
    if (this.state.participantId && this.state.participantId !== token) {
      throw new Error("session already belongs to another participant");
    }
    this.state.participantId = token;
    this.persist();
  }

  get demographicsDraft(): Partial<Demographics> {
    return { ...this.state.demographicsDraft };
  }

  updateDemographicsDraft(patch: Partial<Demographics>): void {
    this.state.demographicsDraft = { ...this.state.demographicsDraft, ...patch };
    this.persist();
  }

  progressOf(experiment: ExperimentId): number {
    return this.state.progress[experiment] ?? 0;
  }

  /** Advance the next-stimulus index; moving backwards is a no-op. */
  advance(experiment: ExperimentId, nextIndex: number): void {
    const current = this.progressOf(experiment);
    if (nextIndex > current) {
      this.state.progress[experiment] = nextIndex;
      this.persist();
    }
  }

  isCompleted(experiment: ExperimentId, stimulusId: string): boolean {
    return this.state.completed.includes(`${experiment}:${stimulusId}`);
  }

  markCompleted(experiment: ExperimentId, stimulusId: string): void {
    const key = `${experiment}:${stimulusId}`;
    if (!this.state.completed.includes(key)) {
      this.state.completed.push(key);
      this.persist();
    }
  }

  reset(): void {
    this.state = { ...EMPTY, progress: { e1: 0, e2: 0, e3: 0 }, completed: [] };
    this.store.remove(this.key);
  }
}
