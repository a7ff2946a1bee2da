import { ApiClient } from "./api";
import { KeyValueStore, annotatorToken } from "./storage";
import { NextPairPayload, PairwiseView, VoteChoice, VoteSubmission, toPairwiseView } from "./types";

export type PairwiseStatus = "idle" | "item" | "done" | "error";

// One vote per item: an idempotency set plus the in-flight guard make a
// double-clicked submit a no-op instead of a second POST.
export class PairwiseSession {
  readonly annotator: string;
  status: PairwiseStatus = "idle";
  view: PairwiseView | null = null;
  lastError: string | null = null;
  private inFlight = false;
  private voted = new Set<string>();

  constructor(
    private api: ApiClient,
    private taskId: string,
    private store: KeyValueStore
  ) {
    this.annotator = annotatorToken(store);
    const raw = store.get(`voted:${taskId}`);
    if (raw) {
      this.voted = new Set(JSON.parse(raw) as string[]);
    }
  }

  async start(): Promise<PairwiseStatus> {
    return this.advance();
  }

  private async advance(): Promise<PairwiseStatus> {
    try {
      const payload = await this.api.pairwiseNext(this.taskId, this.annotator);
      if (payload.done) {
        this.status = "done";
        this.view = null;
      } else {
        this.view = toPairwiseView(payload as NextPairPayload);
        this.status = "item";
      }
      this.lastError = null;
    } catch (err) {
      this.status = "error";
      this.lastError = String(err);
    }
    return this.status;
  }

  async vote(choice: VoteChoice): Promise<"ok" | "duplicate" | "failed"> {
    if (!this.view || this.status !== "item") {
      return "duplicate";
    }
    const itemId = this.view.itemId;
    if (this.inFlight || this.voted.has(itemId)) {
      return "duplicate";
    }
    const body: VoteSubmission = { v: 1, annotator: this.annotator, item_id: itemId, choice };
    this.inFlight = true;
    try {
      await this.api.submitVote(this.taskId, body);
    } catch (err) {
      this.status = "error";
      this.lastError = String(err);
      return "failed";
    } finally {
      this.inFlight = false;
    }
    this.voted.add(itemId);
    this.store.set(`voted:${this.taskId}`, JSON.stringify([...this.voted].sort()));
    await this.advance();
    return "ok";
  }

  async retry(): Promise<PairwiseStatus> {
    return this.advance();
  }
}

export interface PairwiseUi {
  showItem(session: PairwiseSession): Promise<VoteChoice>;
  showRetryBanner(session: PairwiseSession): Promise<void>;
  showDone(): void;
}

export async function runPairwiseFlow(
  session: PairwiseSession,
  ui: PairwiseUi
): Promise<"completed"> {
  await session.start();
  while (session.status !== "done") {
    if (session.status === "error") {
      await ui.showRetryBanner(session);
      await session.retry();
      continue;
    }
    const choice = await ui.showItem(session);
    await session.vote(choice);
  }
  ui.showDone();
  return "completed";
}
