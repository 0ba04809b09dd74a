import type {
  EntityDetails,
  EntitySuggestion,
  Health,
  SearchRequestBody,
  SearchResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** A non-2xx service reply. `body` is the parsed JSON payload, verbatim. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: unknown,
  ) {
    super(`service error ${status}: ${JSON.stringify(body)}`);
    this.name = "ApiError";
  }
}

async function parseBody(response: Response): Promise<unknown> {
  const text = await response.text();
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    const body = await parseBody(response);
    if (!response.ok) {
      throw new ApiError(response.status, body);
    }
    return body;
  }

  search(body: SearchRequestBody, signal?: AbortSignal): Promise<SearchResponse> {
    return this.request("/api/search", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    }) as Promise<SearchResponse>;
  }

  async suggest(prefix: string, limit = 20): Promise<EntitySuggestion[]> {
    const params = new URLSearchParams({ prefix, limit: String(limit) });
    const body = (await this.request(`/api/entities?${params}`)) as {
      entities: EntitySuggestion[];
    };
    return body.entities;
  }

  entity(label: string): Promise<EntityDetails> {
    return this.request(
      `/api/entity/${encodeURIComponent(label)}`,
    ) as Promise<EntityDetails>;
  }

  health(): Promise<Health> {
    return this.request("/api/health") as Promise<Health>;
  }
}
