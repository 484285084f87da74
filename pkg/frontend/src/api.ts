// Thin typed client for the adaptest service. All state lives server-side;
// this module only moves JSON.

import type {
  AdminItem,
  AnswerResponse,
  EngineConfig,
  ExposureStats,
  Report,
  SessionState,
  StartResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
  }
}

async function parseBody(response: Response): Promise<unknown> {
  const text = await response.text();
  if (!text) return null;
  try {
    return JSON.parse(text);
  } catch {
    return text;
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    public adminToken: string | null = null,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    admin = false,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (admin && this.adminToken) headers["X-Admin-Token"] = this.adminToken;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const parsed = await parseBody(response);
    if (!response.ok) {
      const detail =
        parsed && typeof parsed === "object" && "detail" in parsed
          ? (parsed as { detail: unknown }).detail
          : parsed;
      throw new ApiError(response.status, detail);
    }
    return parsed as T;
  }

  // Test part.

  startSession(examineeId: string): Promise<StartResponse> {
    return this.request("POST", "/sessions", { examinee_id: examineeId });
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  submitAnswer(
    sessionId: string,
    itemId: string,
    selectedOptions: number[],
  ): Promise<AnswerResponse> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/answers`,
      { item_id: itemId, selected_options: selectedOptions },
    );
  }

  // Admin part.

  listItems(): Promise<{ scale_constant: number; items: AdminItem[] }> {
    return this.request("GET", "/admin/items", undefined, true);
  }

  createItem(item: AdminItem): Promise<AdminItem> {
    return this.request("POST", "/admin/items", item, true);
  }

  updateItem(item: AdminItem): Promise<AdminItem> {
    return this.request(
      "PUT",
      `/admin/items/${encodeURIComponent(item.id)}`,
      item,
      true,
    );
  }

  deleteItem(itemId: string): Promise<{ deleted: string }> {
    return this.request(
      "DELETE",
      `/admin/items/${encodeURIComponent(itemId)}`,
      undefined,
      true,
    );
  }

  getConfig(): Promise<EngineConfig> {
    return this.request("GET", "/admin/config", undefined, true);
  }

  updateConfig(update: Record<string, unknown>): Promise<EngineConfig> {
    return this.request("PUT", "/admin/config", update, true);
  }

  exposureStats(): Promise<ExposureStats> {
    return this.request("GET", "/admin/stats/exposure", undefined, true);
  }

  sessionReport(sessionId: string): Promise<Report | null> {
    return this.getSession(sessionId).then((state) => state.report);
  }
}
