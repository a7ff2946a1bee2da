// Wire types for the annotation service JSON API (payloads carry a schema
// version "v"). The server never sends model identity; the view types below
// cannot even represent one.

export interface Progress {
  answered: number;
  total: number;
}

export interface NextQuestionPayload {
  v: number;
  done: false;
  survey: string;
  question_id: string;
  question: string;
  answer: string;
  locale: string;
  scales: Record<string, [number, number]>;
  progress: Progress;
}

export interface DonePayload {
  v: number;
  done: true;
  survey: string;
}

export type SurveyNextPayload = NextQuestionPayload | DonePayload;

export interface RatingSubmission {
  v: 1;
  annotator: string;
  question_id: string;
  helpfulness: number;
  naturalness: number;
}

export interface RatingAck {
  v: number;
  status: string;
  overwrite: boolean;
}

export interface NextPairPayload {
  v: number;
  done: false;
  task: string;
  item_id: string;
  left: string;
  right: string;
  choices: string[];
  progress: { voted: number; total: number };
}

export interface PairDonePayload {
  v: number;
  done: true;
  task: string;
}

export type PairwiseNextPayload = NextPairPayload | PairDonePayload;

export type VoteChoice = "left" | "right" | "tie";

export interface VoteSubmission {
  v: 1;
  annotator: string;
  item_id: string;
  choice: VoteChoice;
}

// What the survey screen is allowed to show. Built by picking known fields
// only, so unexpected server fields can never leak into the DOM.
export interface SurveyView {
  questionId: string;
  question: string;
  answer: string;
  progress: Progress;
}

export interface PairwiseView {
  itemId: string;
  left: string;
  right: string;
  progress: { voted: number; total: number };
}

export function toSurveyView(payload: NextQuestionPayload): SurveyView {
  return {
    questionId: payload.question_id,
    question: payload.question,
    answer: payload.answer,
    progress: { answered: payload.progress.answered, total: payload.progress.total },
  };
}

export function toPairwiseView(payload: NextPairPayload): PairwiseView {
  return {
    itemId: payload.item_id,
    left: payload.left,
    right: payload.right,
    progress: { voted: payload.progress.voted, total: payload.progress.total },
  };
}
