// Shapes of the /v1 JSON API. The UI never derives curve values itself;
// everything rendered comes verbatim from these payloads.

export type PointPair = [number, number];

export interface AnswerPathData {
  interval_index: number;
  intent: 'precision' | 'difficulty';
  action?: 'add' | 'remove';
  endpoint?: 'left' | 'right';
  field?: 'x' | 'y';
  direction?: 'increase' | 'decrease';
}

export interface OperationData {
  kind: 'add' | 'remove' | 'change';
  index: number;
  point?: PointPair;
  field?: 'x' | 'y';
  new_value?: number;
  old_value?: number | null;
}

/** One node of the server-rendered question tree. A choice either nests a
 * follow-up question (key/text/choices) or carries a ready-to-submit leaf. */
export interface QuestionChoice {
  label: string;
  value: string | number;
  key?: string;
  text?: string;
  choices?: QuestionChoice[];
  leaf?: AnswerPathData;
}

export interface QuestionNode {
  key: string;
  text: string;
  choices: QuestionChoice[];
}

export interface HistoryEntry {
  path: AnswerPathData;
  operation: OperationData;
  points: PointPair[];
  no_op: boolean;
}

export interface SessionSnapshot {
  id: string;
  text: string;
  pattern: string | null;
  points: PointPair[];
  round: number;
  max_rounds: number;
  finalized: boolean;
  start: PointPair[];
  initial: PointPair[];
  history: HistoryEntry[];
  next_question: QuestionNode | null;
}

export interface AnswerResponse {
  session: SessionSnapshot;
  operation: OperationData;
  no_op: boolean;
}

export interface QuantifyResponse {
  pattern: string;
  threshold: number;
  points: PointPair[];
}
