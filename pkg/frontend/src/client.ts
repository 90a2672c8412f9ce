import type {
  AnswerPathData,
  AnswerResponse,
  QuantifyResponse,
  SessionSnapshot,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    detail?: string,
  ) {
    super(detail ? `${code}: ${detail}` : code);
    this.name = 'ApiError';
  }
}

/** Thin typed wrapper over the /v1 endpoints; the fetch implementation is
 * injectable so tests can replay recorded responses. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async health(): Promise<boolean> {
    const res = await this.fetchImpl(`${this.baseUrl}/v1/health`);
    return res.ok;
  }

  quantify(text: string): Promise<QuantifyResponse> {
    return this.post('/v1/quantify', { text });
  }

  createSession(
    text: string,
    options: { n?: number; points?: [number, number][] } = {},
  ): Promise<SessionSnapshot> {
    return this.post('/v1/sessions', { text, ...options });
  }

  async getSession(id: string): Promise<SessionSnapshot> {
    const res = await this.fetchImpl(`${this.baseUrl}/v1/sessions/${id}`);
    return this.unwrap(res);
  }

  answer(id: string, path: AnswerPathData): Promise<AnswerResponse> {
    return this.post(`/v1/sessions/${id}/answer`, { path });
  }

  finalize(id: string): Promise<{ example_id: string }> {
    return this.post(`/v1/sessions/${id}/finalize`, {});
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    return this.unwrap(res);
  }

  private async unwrap<T>(res: Response): Promise<T> {
    let payload: unknown = null;
    try {
      payload = await res.json();
    } catch {
      // non-JSON body: fall through to the status check
    }
    if (!res.ok) {
      const data = (payload ?? {}) as { error?: string; detail?: string };
      throw new ApiError(res.status, data.error ?? `http-${res.status}`, data.detail);
    }
    return payload as T;
  }
}
