import { ApiClient } from './client.js';
import type {
  AnswerPathData,
  AnswerResponse,
  PointPair,
  QuestionChoice,
  QuestionNode,
  SessionSnapshot,
} from './types.js';

export interface WalkStep {
  question: string;
  label: string;
}

/** Client-side state for one elicitation session.
 *
 * The view holds no curve logic: displayed points are the service snapshot
 * verbatim, and the question walk only descends the tree the service sent,
 * submitting the ready-made answer path found at its leaves. */
export class SessionView {
  private snapshot: SessionSnapshot | null = null;
  private node: QuestionNode | null = null;
  private trail: WalkStep[] = [];
  private pendingLeaf: AnswerPathData | null = null;
  /** Points of the previous round, for before/after curve overlays. */
  previousPoints: PointPair[] | null = null;

  constructor(private readonly client: ApiClient) {}

  async create(text: string, options: { n?: number; points?: PointPair[] } = {}): Promise<SessionSnapshot> {
    this.adopt(await this.client.createSession(text, options));
    this.previousPoints = null;
    return this.require();
  }

  async load(id: string): Promise<SessionSnapshot> {
    this.adopt(await this.client.getSession(id));
    this.previousPoints = null;
    return this.require();
  }

  private adopt(snapshot: SessionSnapshot): void {
    this.snapshot = snapshot;
    this.node = snapshot.next_question;
    this.trail = [];
    this.pendingLeaf = null;
  }

  private require(): SessionSnapshot {
    if (!this.snapshot) throw new Error('no session loaded');
    return this.snapshot;
  }

  get session(): SessionSnapshot | null {
    return this.snapshot;
  }

  /** The exact point list of the current snapshot. */
  points(): PointPair[] {
    return this.require().points;
  }

  roundLabel(): string {
    const s = this.require();
    return `round ${s.round} of ${s.max_rounds}`;
  }

  /** True while another round may be answered. */
  canAnswer(): boolean {
    const s = this.require();
    return !s.finalized && s.next_question !== null;
  }

  /** The question to show, or null when a leaf is pending or none is left. */
  question(): { text: string; choices: { label: string; value: string | number }[] } | null {
    if (!this.node || this.pendingLeaf) return null;
    return {
      text: this.node.text,
      choices: this.node.choices.map((c) => ({ label: c.label, value: c.value })),
    };
  }

  walkTrail(): WalkStep[] {
    return this.trail;
  }

  /** Pick one choice of the current question; returns the pending answer
   * path when the walk reached a leaf, null while questions remain. */
  select(value: string | number): AnswerPathData | null {
    if (!this.node) throw new Error('no question to answer');
    const choice = this.node.choices.find((c) => c.value === value);
    if (!choice) throw new Error(`choice ${String(value)} not offered`);
    this.trail.push({ question: this.node.text, label: choice.label });
    if (choice.leaf) {
      this.pendingLeaf = choice.leaf;
      this.node = null;
      return this.pendingLeaf;
    }
    this.node = asNode(choice);
    return null;
  }

  /** Restart the current round's walk from the root. */
  resetWalk(): void {
    const s = this.require();
    this.node = s.next_question;
    this.trail = [];
    this.pendingLeaf = null;
  }

  /** Submit the walked leaf; the snapshot is replaced by the service's. */
  async submit(): Promise<AnswerResponse> {
    const s = this.require();
    if (!this.pendingLeaf) throw new Error('walk has not reached a leaf');
    const leaf = this.pendingLeaf;
    const response = await this.client.answer(s.id, leaf);
    this.previousPoints = s.points;
    this.adopt(response.session);
    return response;
  }

  async finalize(): Promise<string> {
    const s = this.require();
    const result = await this.client.finalize(s.id);
    s.finalized = true;
    this.node = null;
    return result.example_id;
  }
}

function asNode(choice: QuestionChoice): QuestionNode {
  if (!choice.key || !choice.text || !choice.choices) {
    throw new Error('malformed question tree: choice is neither leaf nor node');
  }
  return { key: choice.key, text: choice.text, choices: choice.choices };
}

/** Map curve points onto an SVG polyline path (presentation scaling only;
 * labels always show the raw snapshot values). */
export function curvePath(
  points: PointPair[],
  width: number,
  height: number,
  pad = 12,
): string {
  if (points.length === 0) return '';
  const first = points[0]!;
  const last = points[points.length - 1]!;
  const xMin = first[0];
  const xSpan = last[0] - xMin || 1;
  const scaleX = (x: number) => pad + ((x - xMin) / xSpan) * (width - 2 * pad);
  const scaleY = (y: number) => height - pad - y * (height - 2 * pad);
  return points
    .map(([x, y], i) => `${i === 0 ? 'M' : 'L'}${scaleX(x).toFixed(2)},${scaleY(y).toFixed(2)}`)
    .join(' ');
}
