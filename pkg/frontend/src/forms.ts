/** Form state for the Likert / yes-no rating experiments.
 *
 * Question text is never known to this module beyond what the server sent:
 * the instrument payload is the single source, and the conditional question
 * is identified structurally (a yes/no question immediately following
 * another yes/no question is gated on the previous answer being "yes"), not
 * by matching any wording.
 */

import type { AnswerMap, FieldError, Instrument, Question } from "./types.js";

export type RatingValue = number | "yes" | "no" | null;

export class RatingForm {
  readonly instrument: Instrument;
  private readonly values = new Map<string, RatingValue>();
  private readonly gatedBy = new Map<string, string>();

  constructor(instrument: Instrument) {
    this.instrument = instrument;
    let previous: Question | null = null;
    for (const question of instrument.questions) {
      this.values.set(question.id, null);
      if (
        question.answer_kind === "yes_no" &&
        previous?.answer_kind === "yes_no"
      ) {
        this.gatedBy.set(question.id, previous.id);
      }
      previous = question;
    }
  }

  valueOf(questionId: string): RatingValue {
    return this.values.get(questionId) ?? null;
  }

  setLikert(questionId: string, value: number): void {
    const question = this.question(questionId);
    if (question.answer_kind !== "likert_1_5") {
      throw new Error(`${questionId} is not a likert question`);
    }
    if (!Number.isInteger(value) || value < 1 || value > 5) {
      throw new Error("likert value must be an integer in 1..5");
    }
    this.values.set(questionId, value);
  }

  setYesNo(questionId: string, value: "yes" | "no"): void {
    const question = this.question(questionId);
    if (question.answer_kind !== "yes_no") {
      throw new Error(`${questionId} is not a yes/no question`);
    }
    this.values.set(questionId, value);
    // hiding a gated question clears whatever was answered there
    for (const [gated, gate] of this.gatedBy) {
      if (gate === questionId && value !== "yes") {
        this.values.set(gated, null);
      }
    }
  }

  private question(questionId: string): Question {
    const found = this.instrument.questions.find((q) => q.id === questionId);
    if (!found) throw new Error(`unknown question ${questionId}`);
    return found;
  }

  /** A gated question is visible only while its gate is answered "yes". */
  isVisible(questionId: string): boolean {
    const gate = this.gatedBy.get(questionId);
    if (gate === undefined) return true;
    return this.values.get(gate) === "yes";
  }

  /** Client-side mirror of the server's arity rules. */
  validate(): FieldError[] {
    const problems: FieldError[] = [];
    for (const question of this.instrument.questions) {
      const value = this.values.get(question.id) ?? null;
      if (this.isVisible(question.id)) {
        if (value === null) {
          problems.push({
            field: `answers.${question.id}`,
            message: "an answer is required",
          });
        }
      } else if (value !== null) {
        problems.push({
          field: `answers.${question.id}`,
          message: "must stay unanswered while hidden",
        });
      }
    }
    return problems;
  }

  get complete(): boolean {
    return this.validate().length === 0;
  }

  /** The submission payload: every question id present, hidden gated
   * questions carried as null. */
  toAnswers(): AnswerMap {
    const answers: AnswerMap = {};
    for (const question of this.instrument.questions) {
      answers[question.id] = this.isVisible(question.id)
        ? this.values.get(question.id) ?? null
        : null;
    }
    return answers;
  }
}
