import { ApiClient } from "./api";
import { KeyValueStore, annotatorToken } from "./storage";
import { NextQuestionPayload, RatingSubmission, SurveyView, toSurveyView } from "./types";

export type SurveyStatus = "idle" | "question" | "done" | "error";

export interface RatingDraft {
  helpfulness: number | null;
  naturalness: number | null;
}

// Survey state machine, framework-free so it runs identically under tests and
// in the browser. One submission in flight at most; the pending rating is
// buffered in the store until the server acknowledges it, so a dropped
// connection or a reload never loses data.
export class SurveySession {
  readonly annotator: string;
  status: SurveyStatus = "idle";
  view: SurveyView | null = null;
  locale = "et";
  lastError: string | null = null;
  private inFlight = false;

  constructor(
    private api: ApiClient,
    private surveyId: string,
    private store: KeyValueStore
  ) {
    this.annotator = annotatorToken(store);
  }

  private draftKey(questionId: string): string {
    return `draft:${this.surveyId}:${questionId}`;
  }

  draft(): RatingDraft {
    if (!this.view) {
      return { helpfulness: null, naturalness: null };
    }
    const raw = this.store.get(this.draftKey(this.view.questionId));
    return raw ? (JSON.parse(raw) as RatingDraft) : { helpfulness: null, naturalness: null };
  }

  setScore(scale: "helpfulness" | "naturalness", value: number): void {
    if (!this.view) {
      throw new Error("no question on screen");
    }
    if (!Number.isInteger(value) || value < 1 || value > 5) {
      throw new Error(`${scale} must be an integer in 1..5`);
    }
    const draft = this.draft();
    draft[scale] = value;
    this.store.set(this.draftKey(this.view.questionId), JSON.stringify(draft));
  }

  get canSubmit(): boolean {
    if (this.status !== "question" || this.inFlight) {
      return false;
    }
    const draft = this.draft();
    return draft.helpfulness !== null && draft.naturalness !== null;
  }

  async start(): Promise<SurveyStatus> {
    return this.advance();
  }

  private async advance(): Promise<SurveyStatus> {
    try {
      const payload = await this.api.surveyNext(this.surveyId, this.annotator);
      if (payload.done) {
        this.status = "done";
        this.view = null;
      } else {
        const question = payload as NextQuestionPayload;
        this.locale = question.locale;
        this.view = toSurveyView(question);
        this.status = "question";
      }
      this.lastError = null;
    } catch (err) {
      this.status = "error";
      this.lastError = String(err);
    }
    return this.status;
  }

  /** Submit the buffered rating. Returns "blocked" without touching the
   * network unless both scales are selected. */
  async submit(): Promise<"ok" | "blocked" | "failed"> {
    if (!this.canSubmit || !this.view) {
      return "blocked";
    }
    const view = this.view;
    const draft = this.draft();
    const body: RatingSubmission = {
      v: 1,
      annotator: this.annotator,
      question_id: view.questionId,
      helpfulness: draft.helpfulness as number,
      naturalness: draft.naturalness as number,
    };
    this.inFlight = true;
    try {
      await this.api.submitRating(this.surveyId, body);
    } catch (err) {
      this.status = "error";
      this.lastError = String(err);
      return "failed"; // draft stays buffered for retry
    } finally {
      this.inFlight = false;
    }
    this.store.remove(this.draftKey(view.questionId));
    await this.advance();
    return "ok";
  }

  /** After a network failure: re-fetch or re-submit, draft intact. */
  async retry(): Promise<SurveyStatus> {
    if (this.view && this.canSubmitAfterError()) {
      await this.submitAfterError();
    } else {
      await this.advance();
    }
    return this.status;
  }

  private canSubmitAfterError(): boolean {
    const draft = this.draft();
    return draft.helpfulness !== null && draft.naturalness !== null;
  }

  private async submitAfterError(): Promise<void> {
    this.status = "question"; // leave the error banner, allow the submit path
    await this.submit();
  }
}

export interface SurveyUi {
  showQuestion(session: SurveySession): Promise<void>;
  showRetryBanner(session: SurveySession): Promise<void>;
  showDone(): void;
}

/** Drive a full survey session: fetch, render, submit until done. */
export async function runSurveyFlow(session: SurveySession, ui: SurveyUi): Promise<"completed"> {
  await session.start();
  while (session.status !== "done") {
    if (session.status === "error") {
      await ui.showRetryBanner(session);
      await session.retry();
      continue;
    }
    await ui.showQuestion(session);
    await session.submit();
  }
  ui.showDone();
  return "completed";
}
