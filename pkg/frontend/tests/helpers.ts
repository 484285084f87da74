// Scripted fetch for unit tests: match (method, path) against handlers.

import { vi } from "vitest";

export type RouteHandler = (body: unknown) => {
  status?: number;
  body: unknown;
};

export interface Route {
  method: string;
  path: RegExp;
  handler: RouteHandler;
}

export function installFetchRoutes(routes: Route[]): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    for (const route of routes) {
      if (route.method === method && route.path.test(path)) {
        const parsed = init?.body ? JSON.parse(String(init.body)) : undefined;
        const result = route.handler(parsed);
        return new Response(JSON.stringify(result.body), {
          status: result.status ?? 200,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    throw new Error(`no route for ${method} ${path}`);
  });
  vi.stubGlobal("fetch", mock);
  return mock;
}

export async function until(
  condition: () => boolean,
  timeoutMs = 2000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!condition()) {
    if (Date.now() > deadline) throw new Error("condition never became true");
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}

export function item(id: string, position: number, phase = "warmup") {
  return {
    item_id: id,
    stem: `Stem of ${id}`,
    options: ["Option A", "Option B", "Option C", "Option D"],
    position,
    phase,
  };
}

export const sampleReport = {
  theta: 0.62,
  standard_error: 0.29,
  finish_reason: "max_items",
  items: [
    { item_id: "q1", u: 1, difficulty_level: 1 },
    { item_id: "q2", u: 0, difficulty_level: 3 },
  ],
  level_correct_ratios: { "1": 1.0, "3": 0.0 },
};
