import type {
  ApiErrorBody,
  ExecuteResponse,
  GraphJson,
  HighlightResponse,
  MinimapResponse,
  SuggestionsResponse,
  TopicsResponse,
  ValidateResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/**
 * Thin client over the /v1 API. The UI never ranks or builds SPARQL itself;
 * everything displayed comes verbatim from these responses.
 */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(0, "NetworkError", String(err));
    }
    if (!response.ok) {
      let parsed: ApiErrorBody | null = null;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        // non-JSON error body
      }
      throw new ApiError(
        response.status,
        parsed?.code ?? "HttpError",
        parsed?.message ?? `${response.status} on ${path}`,
      );
    }
    return (await response.json()) as T;
  }

  topics(): Promise<TopicsResponse> {
    return this.request("GET", "/v1/topics");
  }

  startLinks(topicIds: number[], k = 10): Promise<SuggestionsResponse> {
    return this.request("POST", "/v1/suggest/start-links", { topicIds, k });
  }

  outLinks(classIri: string, query: string, k = 20): Promise<SuggestionsResponse> {
    return this.request("POST", "/v1/suggest/out-links", { classIri, query, k });
  }

  constraintProps(classIri: string, query: string, k = 20): Promise<SuggestionsResponse> {
    return this.request("POST", "/v1/suggest/constraints", { classIri, query, k });
  }

  validate(graph: GraphJson): Promise<ValidateResponse> {
    return this.request("POST", "/v1/graph/validate", { graph });
  }

  execute(
    graph: GraphJson,
    limit: number,
    offset: number,
    signal?: AbortSignal,
  ): Promise<ExecuteResponse> {
    return this.request("POST", "/v1/graph/execute", { graph, limit, offset }, signal);
  }

  minimap(): Promise<MinimapResponse> {
    return this.request("GET", "/v1/layout/minimap");
  }

  highlight(graph: GraphJson): Promise<HighlightResponse> {
    return this.request("POST", "/v1/layout/highlight", { graph });
  }
}
