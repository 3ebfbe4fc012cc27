/** Typed client for the session service HTTP/JSON API. */

export interface GraphEdge {
  sign: "pos" | "neg";
  from: string;
  to: string;
}

export interface GraphPayload {
  roots: string[];
  edges: GraphEdge[];
}

export interface SolutionDiff {
  entered: string[];
  left: string[];
}

export interface SolveBundle {
  status: string;
  cost: number | null;
  abduced: string[];
  holds: string[];
  graph: GraphPayload;
  all_optimal: string[][];
  encoding_digest: string;
  facts: { base: string[]; dynamic: string[] };
  diff?: SolutionDiff;
}

export interface SessionSummary {
  id: string;
  query: string;
  variant: string;
  depth: number;
  facts: { base: string[]; dynamic: string[] };
  history: { action: string; at: number; cost: number | null }[];
}

export interface GeneralizeStep {
  added_fact: string | null;
  solution: string[];
  all_optimal: string[][];
  picked: string | null;
}

export interface GeneralizeResult {
  abduced: string[];
  generalized: string[];
  var_map: Record<string, string>;
  exhausted: boolean;
  trace: GeneralizeStep[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    throw new ApiError(response.status, body?.detail ?? body);
  }
  return body as T;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  createSession(rules: string, task: string): Promise<{ id: string }> {
    return request(this.url("/sessions"), {
      method: "POST",
      body: JSON.stringify({ rules, task }),
    });
  }

  summary(id: string): Promise<SessionSummary> {
    return request(this.url(`/sessions/${id}`));
  }

  encoding(id: string): Promise<{ text: string; variant: string; maxAbLvl: number }> {
    return request(this.url(`/sessions/${id}/encoding`));
  }

  solve(id: string): Promise<SolveBundle> {
    return request(this.url(`/sessions/${id}/solve`), { method: "POST" });
  }

  addFact(id: string, atom: string): Promise<SolveBundle> {
    return request(this.url(`/sessions/${id}/facts`), {
      method: "POST",
      body: JSON.stringify({ atom }),
    });
  }

  removeFact(id: string, atom: string): Promise<SolveBundle> {
    return request(this.url(`/sessions/${id}/facts`), {
      method: "DELETE",
      body: JSON.stringify({ atom }),
    });
  }

  graph(id: string): Promise<GraphPayload> {
    return request(this.url(`/sessions/${id}/graph?format=json`));
  }

  generalize(id: string, options: { maxIters?: number; pick?: string } = {}): Promise<GeneralizeResult> {
    return request(this.url(`/sessions/${id}/generalize`), {
      method: "POST",
      body: JSON.stringify(options),
    });
  }
}
