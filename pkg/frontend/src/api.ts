import {
  PairwiseNextPayload,
  RatingAck,
  RatingSubmission,
  SurveyNextPayload,
  VoteSubmission,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args)
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!resp.ok) {
      throw new ApiError(`GET ${path} failed: ${resp.status}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new ApiError(`POST ${path} failed: ${resp.status}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  surveyNext(surveyId: string, annotator: string): Promise<SurveyNextPayload> {
    return this.getJson(`/survey/${surveyId}/next?annotator=${encodeURIComponent(annotator)}`);
  }

  submitRating(surveyId: string, body: RatingSubmission): Promise<RatingAck> {
    return this.postJson(`/survey/${surveyId}/rating`, body);
  }

  pairwiseNext(taskId: string, annotator: string): Promise<PairwiseNextPayload> {
    return this.getJson(`/pairwise/${taskId}/next?annotator=${encodeURIComponent(annotator)}`);
  }

  submitVote(taskId: string, body: VoteSubmission): Promise<RatingAck> {
    return this.postJson(`/pairwise/${taskId}/vote`, body);
  }
}
