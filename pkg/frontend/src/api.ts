// Typed client for the matching session service. The UI keeps no
// authoritative state: every view is re-derived from these responses.

export interface AttributeState {
  name: string;
  phase: 'root_search' | 'expanding' | 'done';
  done_reason: string | null;
  interactions_used: number;
  confirmed_count: number;
  budget: number;
  confirm_threshold: number;
}

export interface SessionState {
  session_id: string;
  attributes: AttributeState[];
}

export interface CandidateView {
  nugget_id: string;
  mention: string;
  context_sentence: string;
  document_id: string;
  label: string;
  distance: number;
  parent: string | null;
}

export interface DoneView {
  done: string;
}

export type CandidateResponse = CandidateView | DoneView;

export interface SessionConfig {
  k?: number;
  confirm_threshold?: number;
  budget?: number;
  q0?: number;
  tau?: number | null;
  seed?: number;
}

export interface OpenSessionRequest {
  docs: string;
  nuggets: string;
  vectors: string;
  labelmap?: string | null;
  attributes: string[];
  config?: SessionConfig;
}

export type Decision = 'confirm' | 'reject';

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly kind: string,
    public readonly detail: string,
  ) {
    super(`${kind}: ${detail}`);
  }
}

export function isDone(response: CandidateResponse): response is DoneView {
  return (response as DoneView).done !== undefined;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!res.ok) {
      let kind = `http-${res.status}`;
      let detail = res.statusText;
      try {
        const body = (await res.json()) as { error?: string; detail?: string };
        kind = body.error ?? kind;
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(res.status, kind, detail);
    }
    return (await res.json()) as T;
  }

  openSession(request: OpenSessionRequest): Promise<SessionState> {
    return this.request<SessionState>('/sessions', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request<SessionState>(`/sessions/${sessionId}`);
  }

  nextCandidate(sessionId: string, attribute: string): Promise<CandidateResponse> {
    return this.request<CandidateResponse>(
      `/sessions/${sessionId}/attributes/${encodeURIComponent(attribute)}/candidate`,
    );
  }

  submitFeedback(
    sessionId: string,
    attribute: string,
    nuggetId: string,
    decision: Decision,
  ): Promise<AttributeState> {
    return this.request<AttributeState>(
      `/sessions/${sessionId}/attributes/${encodeURIComponent(attribute)}/feedback`,
      {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ nugget_id: nuggetId, decision }),
      },
    );
  }

  async exportCsv(sessionId: string): Promise<string> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/table?format=csv`,
    );
    if (!res.ok) {
      const body = (await res.json()) as { error?: string; detail?: string };
      throw new ServiceError(res.status, body.error ?? 'error', body.detail ?? '');
    }
    return res.text();
  }

  getTableJson(sessionId: string): Promise<TableView> {
    return this.request<TableView>(`/sessions/${sessionId}/table?format=json`);
  }
}

export interface TableCell {
  value: string;
  kind: string;
  nugget_id: string;
  span: [number, number];
  distance: number;
}

export interface TableRow {
  document_id: string;
  cells: Record<string, TableCell | null>;
}

export interface TableView {
  attributes: string[];
  rows: TableRow[];
}
