/** Ranking board for the five-way comparison experiment.
 *
 * Cards start in an unranked pool; the rater assigns each to a place (drag or
 * click). Submission stays blocked until the five places hold a full
 * permutation of the served cards -- there is no way to submit a partial or
 * duplicated order.
 */

import type { RankCard } from "./types.js";

export class RankingBoard {
  readonly cards: RankCard[];
  /** places[i] = card id ranked at place i+1, or null while unassigned */
  private places: (string | null)[];

  constructor(cards: RankCard[]) {
    if (cards.length !== 5) {
      throw new Error(`a ranking board needs exactly 5 cards, got ${cards.length}`);
    }
    const ids = new Set(cards.map((c) => c.card_id));
    if (ids.size !== 5) throw new Error("card ids must be distinct");
    this.cards = [...cards];
    this.places = [null, null, null, null, null];
  }

  private indexOfCard(cardId: string): number {
    const index = this.cards.findIndex((c) => c.card_id === cardId);
    if (index < 0) throw new Error(`unknown card ${cardId}`);
    return index;
  }

  placeOf(cardId: string): number | null {
    this.indexOfCard(cardId);
    const place = this.places.indexOf(cardId);
    return place < 0 ? null : place;
  }

  cardAt(place: number): string | null {
    if (place < 0 || place > 4) throw new Error("place must be 0..4");
    return this.places[place] ?? null;
  }

  /** Cards not yet assigned to a place, in served order. */
  pool(): RankCard[] {
    return this.cards.filter((c) => !this.places.includes(c.card_id));
  }

  /** Put a card at a place; the card leaves any previous place, and a card
   * already occupying the target moves back to the pool. */
  assign(cardId: string, place: number): void {
    this.indexOfCard(cardId);
    if (place < 0 || place > 4) throw new Error("place must be 0..4");
    const current = this.places.indexOf(cardId);
    if (current >= 0) this.places[current] = null;
    this.places[place] = cardId;
  }

  unassign(place: number): void {
    if (place < 0 || place > 4) throw new Error("place must be 0..4");
    this.places[place] = null;
  }

  /** Convenience for click-to-rank: drop the card into the first free place. */
  assignNext(cardId: string): void {
    const free = this.places.indexOf(null);
    if (free < 0) throw new Error("all places are taken");
    this.assign(cardId, free);
  }

  reset(): void {
    this.places = [null, null, null, null, null];
  }

  /** True only when the five places hold a permutation of the served cards. */
  get complete(): boolean {
    const assigned = this.places.filter((p): p is string => p !== null);
    return assigned.length === 5 && new Set(assigned).size === 5;
  }

  /** The answer payload: card ids from first to last place. */
  toAnswer(): string[] {
    if (!this.complete) {
      throw new Error("ranking is incomplete; submission is blocked");
    }
    return this.places.map((p) => p!);
  }
}
