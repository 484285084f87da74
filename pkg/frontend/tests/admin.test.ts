// @vitest-environment jsdom

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { AdminView } from "../src/admin";
import { ApiClient } from "../src/api";
import { renderHistogram } from "../src/histogram";
import { installFetchRoutes, until, type Route } from "./helpers";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="root"></div>';
  root = document.getElementById("root")!;
});

afterEach(() => {
  vi.unstubAllGlobals();
});

const defaultConfig = {
  termination: { max_items: 30, min_items: 5, se_threshold: null, theta_guard: 4.0 },
  strategy: { kind: "cluster", k: 10, epsilon: 1e-9 },
};

const bankItem = {
  id: "item-001",
  stem: "Sample question",
  options: ["a", "b"],
  correct_options: [0],
  difficulty_level: 1,
  topic: "arithmetic",
  a: 1.0,
  b: -3.0,
  c: 0.5,
  c_overridden: false,
  active: true,
};

function consoleRoutes(extra: Route[] = []): Route[] {
  return [
    {
      method: "GET",
      path: /^\/admin\/config$/,
      handler: () => ({ body: defaultConfig }),
    },
    {
      method: "GET",
      path: /^\/admin\/items$/,
      handler: () => ({ body: { scale_constant: 1.7, items: [bankItem] } }),
    },
    ...extra,
  ];
}

async function mountConsole(extra: Route[] = []): Promise<AdminView> {
  installFetchRoutes(consoleRoutes(extra));
  const api = new ApiClient("http://api.test", "tok");
  const view = new AdminView(root, api);
  await view.mount();
  await until(() => root.querySelector("[data-view=admin-console]") !== null);
  return view;
}

describe("admin login", () => {
  it("prompts for a token when none is set", async () => {
    installFetchRoutes([]);
    await new AdminView(root, new ApiClient("http://api.test")).mount();
    expect(root.querySelector("[data-view=admin-login]")).not.toBeNull();
  });

  it("rejects a bad token and returns to the prompt", async () => {
    installFetchRoutes([
      {
        method: "GET",
        path: /^\/admin\/config$/,
        handler: () => ({ status: 401, body: { detail: "missing or invalid admin token" } }),
      },
    ]);
    const api = new ApiClient("http://api.test", "wrong");
    await new AdminView(root, api).mount();
    expect(root.querySelector("[data-view=admin-login]")).not.toBeNull();
    expect(root.querySelector("#login-error")!.textContent).toContain("Invalid");
    expect(api.adminToken).toBeNull();
  });
});

describe("admin console", () => {
  it("renders current settings and the item bank", async () => {
    await mountConsole();
    expect(root.querySelector<HTMLInputElement>("#cfg-max-items")!.value).toBe("30");
    expect(root.querySelector("#item-count")!.textContent).toBe("1");
    expect(root.querySelector("[data-item=item-001]")).not.toBeNull();
  });

  it("saves termination settings including the se threshold", async () => {
    let sent: Record<string, unknown> | null = null;
    await mountConsole([
      {
        method: "PUT",
        path: /^\/admin\/config$/,
        handler: (body) => {
          sent = body as Record<string, unknown>;
          return {
            body: {
              ...defaultConfig,
              termination: { ...defaultConfig.termination, max_items: 20, se_threshold: 0.3 },
            },
          };
        },
      },
    ]);
    root.querySelector<HTMLInputElement>("#cfg-max-items")!.value = "20";
    root.querySelector<HTMLInputElement>("#cfg-se-threshold")!.value = "0.3";
    root
      .querySelector<HTMLFormElement>("#config-form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await until(() => sent !== null);
    expect(sent).toMatchObject({ max_items: 20, se_threshold: 0.3 });
    await until(() =>
      root.querySelector("#config-status")!.textContent!.includes("cap at 20"),
    );
  });

  it("clears the se threshold when the field is blank", async () => {
    let sent: Record<string, unknown> | null = null;
    await mountConsole([
      {
        method: "PUT",
        path: /^\/admin\/config$/,
        handler: (body) => {
          sent = body as Record<string, unknown>;
          return { body: defaultConfig };
        },
      },
    ]);
    root.querySelector<HTMLInputElement>("#cfg-se-threshold")!.value = "";
    root
      .querySelector<HTMLFormElement>("#config-form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await until(() => sent !== null);
    expect(sent).toMatchObject({ clear_se_threshold: true });
  });

  it("prefills the guessing field from the option structure", async () => {
    await mountConsole();
    root.querySelector<HTMLInputElement>("#item-id")!.value = "new-1";
    root.querySelector<HTMLTextAreaElement>("#item-stem")!.value = "Pick two.";
    root.querySelector<HTMLTextAreaElement>("#item-options")!.value = "a\nb\nc\nd\ne";
    root.querySelector<HTMLInputElement>("#item-correct")!.value = "0, 2";
    root
      .querySelector<HTMLFormElement>("#item-form")!
      .dispatchEvent(new Event("input", { bubbles: true }));
    expect(root.querySelector<HTMLInputElement>("#item-guessing")!.value).toBe("0.1");
  });

  it("blocks invalid drafts client-side", async () => {
    await mountConsole();
    root.querySelector<HTMLInputElement>("#item-id")!.value = "bad-1";
    root.querySelector<HTMLTextAreaElement>("#item-stem")!.value = "Broken";
    root.querySelector<HTMLTextAreaElement>("#item-options")!.value = "only";
    root.querySelector<HTMLInputElement>("#item-correct")!.value = "0";
    root
      .querySelector<HTMLFormElement>("#item-form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await until(() => root.querySelector("#item-errors")!.textContent!.length > 0);
    expect(root.querySelector("#item-errors")!.textContent).toContain("two options");
  });

  it("mirrors server-side validation details", async () => {
    await mountConsole([
      {
        method: "POST",
        path: /^\/admin\/items$/,
        handler: () => ({
          status: 422,
          body: { detail: ["item 'new-1': correct option index(es) [4] outside 0..1"] },
        }),
      },
    ]);
    root.querySelector<HTMLInputElement>("#item-id")!.value = "new-1";
    root.querySelector<HTMLTextAreaElement>("#item-stem")!.value = "Tricky";
    root.querySelector<HTMLTextAreaElement>("#item-options")!.value = "a\nb";
    root.querySelector<HTMLInputElement>("#item-correct")!.value = "1";
    root
      .querySelector<HTMLFormElement>("#item-form")!
      .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
    await until(() => root.querySelector("#item-errors")!.textContent!.length > 0);
    expect(root.querySelector("#item-errors")!.textContent).toContain(
      "outside 0..1",
    );
  });

  it("renders exposure statistics as proportional bars", async () => {
    await mountConsole([
      {
        method: "GET",
        path: /^\/admin\/stats\/exposure$/,
        handler: () => ({
          body: {
            finished_sessions: 4,
            sigma: 1.25,
            counts: { "item-001": 4, "item-002": 2, "item-003": 0 },
          },
        }),
      },
    ]);
    root.querySelector<HTMLButtonElement>("#exposure-refresh")!.click();
    await until(() => root.querySelectorAll(".bar-row").length === 3);
    expect(root.querySelector("#exposure-summary")!.textContent).toContain("4 finished");
    const widths = Array.from(
      root.querySelectorAll<HTMLElement>(".bar-row .bar"),
      (bar) => parseFloat(bar.style.width),
    );
    expect(widths[0]).toBeCloseTo(100);
    expect(widths[1]).toBeCloseTo(50);
    expect(widths[2]).toBeCloseTo(0);
  });
});

describe("histogram", () => {
  it("handles an all-zero count table", () => {
    renderHistogram(root, { a: 0, b: 0 });
    expect(root.querySelectorAll(".bar-row")).toHaveLength(2);
    for (const bar of root.querySelectorAll<HTMLElement>(".bar")) {
      expect(parseFloat(bar.style.width)).toBe(0);
    }
  });
});
