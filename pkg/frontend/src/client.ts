import type {
  ActionDetail,
  HierarchyNode,
  RecommendRequest,
  RecommendResponse,
  StatsResponse,
} from "./types.js";

/** Error body the service returns for 4xx responses. */
export class ServiceError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function unwrap<T>(resp: Response): Promise<T> {
  if (resp.ok) {
    return (await resp.json()) as T;
  }
  let code = "http_error";
  let message = `${resp.status}`;
  try {
    const body = (await resp.json()) as { error?: { code?: string; message?: string } };
    code = body.error?.code ?? code;
    message = body.error?.message ?? message;
  } catch {
    // non-JSON error body, keep the status text
  }
  throw new ServiceError(code, message, resp.status);
}

/** Thin wrapper over the service HTTP API. At most one recommend request is
 * live at a time: firing a new one supersedes the old, and a superseded
 * response resolves to null instead of the payload so callers drop it. */
export class ApiClient {
  private recommendEpoch = 0;

  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async recommend(body: RecommendRequest): Promise<RecommendResponse | null> {
    const epoch = ++this.recommendEpoch;
    const resp = await this.fetchFn(`${this.base}/api/recommend`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (epoch !== this.recommendEpoch) {
      return null;
    }
    return unwrap<RecommendResponse>(resp);
  }

  async action(id: string): Promise<ActionDetail> {
    const resp = await this.fetchFn(`${this.base}/api/action/${encodeURIComponent(id)}`);
    return unwrap<ActionDetail>(resp);
  }

  async hierarchy(id: string): Promise<HierarchyNode[]> {
    const resp = await this.fetchFn(`${this.base}/api/hierarchy/${encodeURIComponent(id)}`);
    const body = await unwrap<{ hierarchy: HierarchyNode[] }>(resp);
    return body.hierarchy;
  }

  async stats(): Promise<StatsResponse> {
    const resp = await this.fetchFn(`${this.base}/api/stats`);
    return unwrap<StatsResponse>(resp);
  }
}
