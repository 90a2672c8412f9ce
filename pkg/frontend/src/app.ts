import { ApiClient, ApiError } from './client.js';
import { curvePath, SessionView } from './view.js';
import type { PointPair } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const WIDTH = 640;
const HEIGHT = 320;

const client = new ApiClient('');
const view = new SessionView(client);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(value: number): string {
  return String(value);
}

function renderCurve(container: HTMLElement): void {
  container.innerHTML = '';
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute('class', 'curve');

  const draw = (points: PointPair[], cls: string) => {
    const path = document.createElementNS(SVG_NS, 'path');
    path.setAttribute('d', curvePath(points, WIDTH, HEIGHT));
    path.setAttribute('class', cls);
    svg.appendChild(path);
    for (const [x, y] of points) {
      const dot = document.createElementNS(SVG_NS, 'circle');
      const d = curvePath([[x, y]], WIDTH, HEIGHT);
      // curvePath on a single point yields "Mx,y"; reuse its scaling
      const [cx, cy] = d.slice(1).split(',');
      dot.setAttribute('cx', cx ?? '0');
      dot.setAttribute('cy', cy ?? '0');
      dot.setAttribute('r', '4');
      dot.setAttribute('class', `${cls}-dot`);
      const label = document.createElementNS(SVG_NS, 'title');
      label.textContent = `(${fmt(x)}, ${fmt(y)})`;
      dot.appendChild(label);
      svg.appendChild(dot);
    }
  };

  if (view.previousPoints) draw(view.previousPoints, 'previous');
  draw(view.points(), 'current');
  container.appendChild(svg);

  const labels = el('div', 'point-labels');
  labels.textContent = view.points().map(([x, y]) => `(${fmt(x)}, ${fmt(y)})`).join('  ');
  container.appendChild(labels);
}

function renderQuestion(container: HTMLElement, onChange: () => void): void {
  container.innerHTML = '';
  if (!view.session) return;
  const header = el('p', 'round-label', view.roundLabel());
  container.appendChild(header);

  const trail = view.walkTrail();
  if (trail.length) {
    const crumbs = el('p', 'trail', trail.map((s) => s.label).join(' > '));
    container.appendChild(crumbs);
  }

  const question = view.question();
  if (question) {
    container.appendChild(el('h3', 'question', question.text));
    const list = el('div', 'choices');
    for (const choice of question.choices) {
      const button = el('button', 'choice', choice.label);
      button.addEventListener('click', async () => {
        const leaf = view.select(choice.value);
        if (leaf) {
          try {
            await view.submit();
          } catch (err) {
            showError(err);
            view.resetWalk();
          }
        }
        onChange();
      });
      list.appendChild(button);
    }
    container.appendChild(list);
    if (trail.length) {
      const restart = el('button', 'restart', 'start this round over');
      restart.addEventListener('click', () => {
        view.resetWalk();
        onChange();
      });
      container.appendChild(restart);
    }
  } else if (!view.canAnswer() && !view.session.finalized) {
    container.appendChild(el('p', 'notice', 'All rounds used. Finalize to store the curve.'));
  }
}

function renderHistory(container: HTMLElement): void {
  container.innerHTML = '';
  if (!view.session || view.session.history.length === 0) return;
  container.appendChild(el('h3', undefined, 'History'));
  const list = el('ol', 'history');
  for (const entry of view.session.history) {
    const op = entry.operation;
    const summary =
      op.kind === 'add'
        ? `added point (${fmt(op.point![0])}, ${fmt(op.point![1])})`
        : op.kind === 'remove'
          ? `removed point ${op.index}`
          : `changed ${op.field} of point ${op.index} to ${fmt(op.new_value!)}`;
    const item = el('li', undefined,
      `${summary}${entry.no_op ? ' (clamped: no change)' : ''} -> ` +
      entry.points.map(([x, y]) => `(${fmt(x)}, ${fmt(y)})`).join(' '));
    list.appendChild(item);
  }
  container.appendChild(list);
}

function showError(err: unknown): void {
  const banner = document.getElementById('error')!;
  if (err instanceof ApiError && err.status === 404) {
    banner.textContent = 'session not found';
  } else if (err instanceof ApiError) {
    banner.textContent = err.message;
  } else {
    banner.textContent = `service unreachable: ${String(err)} (retry when it is back)`;
  }
  banner.hidden = false;
}

function clearError(): void {
  const banner = document.getElementById('error')!;
  banner.hidden = true;
}

export function mount(root: HTMLElement): void {
  root.innerHTML = `
    <h1>Satisfaction-curve elicitation</h1>
    <div id="error" class="error" hidden></div>
    <form id="start">
      <textarea id="text" rows="3" placeholder="Paste a performance requirement"></textarea>
      <label>rounds <input id="rounds" type="number" min="1" max="9" value="5"></label>
      <button type="submit">start session</button>
    </form>
    <section id="curve"></section>
    <section id="question"></section>
    <section id="history"></section>
    <button id="finalize" hidden>finalize (store this curve)</button>
    <p id="stored" hidden></p>
  `;

  const curve = document.getElementById('curve')!;
  const question = document.getElementById('question')!;
  const history = document.getElementById('history')!;
  const finalize = document.getElementById('finalize') as HTMLButtonElement;
  const stored = document.getElementById('stored')!;

  const sync = () => {
    clearError();
    if (!view.session) return;
    renderCurve(curve);
    renderQuestion(question, sync);
    renderHistory(history);
    finalize.hidden = false;
    finalize.disabled = view.session.finalized;
  };

  document.getElementById('start')!.addEventListener('submit', async (event) => {
    event.preventDefault();
    const text = (document.getElementById('text') as HTMLTextAreaElement).value.trim();
    const rounds = Number((document.getElementById('rounds') as HTMLInputElement).value);
    if (!text) return;
    try {
      await view.create(text, { n: rounds });
      stored.hidden = true;
      sync();
    } catch (err) {
      showError(err);
    }
  });

  finalize.addEventListener('click', async () => {
    try {
      const exampleId = await view.finalize();
      stored.textContent = `stored as example ${exampleId}`;
      stored.hidden = false;
      sync();
    } catch (err) {
      showError(err);
    }
  });
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  mount(document.getElementById('app')!);
}
