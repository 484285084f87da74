// @vitest-environment jsdom

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { ExamineeView } from "../src/examinee";
import { installFetchRoutes, item, sampleReport, until } from "./helpers";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="root"></div>';
  root = document.getElementById("root")!;
  window.sessionStorage.clear();
});

afterEach(() => {
  vi.unstubAllGlobals();
});

function view(): ExamineeView {
  return new ExamineeView(root, new ApiClient("http://api.test"));
}

async function startTest(): Promise<void> {
  await view().mount();
  root.querySelector<HTMLInputElement>("#examinee-id")!.value = "alice";
  root
    .querySelector<HTMLFormElement>("#start-form")!
    .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
  await until(() => root.querySelector("[data-view=question]") !== null);
}

describe("examinee flow", () => {
  it("starts a session and renders the first item", async () => {
    installFetchRoutes([
      {
        method: "POST",
        path: /^\/sessions$/,
        handler: (body) => {
          expect(body).toEqual({ examinee_id: "alice" });
          return { status: 201, body: { session_id: "s1", item: item("q1", 1) } };
        },
      },
    ]);
    await startTest();
    expect(root.querySelector("#stem")!.textContent).toContain("Stem of q1");
    expect(root.querySelectorAll('input[name="option"]')).toHaveLength(4);
    expect(root.querySelector("#phase-banner")!.textContent).toContain("Warmup");
    expect(window.sessionStorage.getItem("adaptest.session")).toBe("s1");
  });

  it("renders the next item in place after an answer", async () => {
    installFetchRoutes([
      {
        method: "POST",
        path: /^\/sessions$/,
        handler: () => ({ status: 201, body: { session_id: "s1", item: item("q1", 1) } }),
      },
      {
        method: "POST",
        path: /^\/sessions\/s1\/answers$/,
        handler: (body) => {
          expect(body).toEqual({ item_id: "q1", selected_options: [1, 3] });
          return { body: { status: "next", item: item("q2", 2, "adaptive") } };
        },
      },
    ]);
    await startTest();
    const boxes = root.querySelectorAll<HTMLInputElement>('input[name="option"]');
    boxes[1].checked = true;
    boxes[3].checked = true;
    root.querySelector<HTMLButtonElement>("#submit-answer")!.click();
    await until(() => root.querySelector("#stem")!.textContent!.includes("q2"));
    expect(root.querySelector("#phase-banner")!.textContent).toContain("Adaptive");
    expect(root.querySelector("#progress")!.textContent).toContain("2");
  });

  it("renders the report with the finish reason when the test ends", async () => {
    installFetchRoutes([
      {
        method: "POST",
        path: /^\/sessions$/,
        handler: () => ({ status: 201, body: { session_id: "s1", item: item("q1", 1) } }),
      },
      {
        method: "POST",
        path: /^\/sessions\/s1\/answers$/,
        handler: () => ({ body: { status: "finished", report: sampleReport } }),
      },
    ]);
    await startTest();
    root.querySelector<HTMLButtonElement>("#submit-answer")!.click();
    await until(() => root.querySelector("[data-view=report]") !== null);
    const reason = root.querySelector<HTMLElement>("#finish-reason")!;
    expect(reason.dataset.reason).toBe("max_items");
    expect(reason.textContent).toContain("Maximum test length");
    expect(root.querySelector("#theta")!.textContent).toBe("0.62");
    expect(root.querySelector("#level-table")!.textContent).toContain("Level 1");
  });

  it("keeps a single answer in flight and disables the button meanwhile", async () => {
    let release: (value: Response) => void = () => {};
    const gate = new Promise<Response>((resolve) => {
      release = resolve;
    });
    const fetchMock = vi.fn(async (input: RequestInfo | URL, _init?: RequestInit) => {
      const path = String(input).replace(/^https?:\/\/[^/]+/, "");
      if (path === "/sessions") {
        return new Response(
          JSON.stringify({ session_id: "s1", item: item("q1", 1) }),
          { status: 201 },
        );
      }
      return gate;
    });
    vi.stubGlobal("fetch", fetchMock);

    await startTest();
    const button = root.querySelector<HTMLButtonElement>("#submit-answer")!;
    button.click();
    await until(() => button.disabled);
    button.click();
    button.click();
    release(
      new Response(JSON.stringify({ status: "next", item: item("q2", 2) }), {
        status: 200,
      }),
    );
    await until(() => root.querySelector("#stem")!.textContent!.includes("q2"));
    // One POST /sessions plus exactly one answer submission.
    expect(fetchMock).toHaveBeenCalledTimes(2);
  });

  it("resumes at the pending item after a refresh", async () => {
    window.sessionStorage.setItem("adaptest.session", "s9");
    installFetchRoutes([
      {
        method: "GET",
        path: /^\/sessions\/s9$/,
        handler: () => ({
          body: {
            session_id: "s9",
            examinee_id: "alice",
            phase: "adaptive",
            answered: 7,
            item: item("q8", 8, "adaptive"),
            report: null,
          },
        }),
      },
    ]);
    await view().mount();
    expect(root.querySelector("[data-view=question]")).not.toBeNull();
    expect(root.querySelector("#stem")!.textContent).toContain("q8");
  });

  it("shows the report when resuming a finished session", async () => {
    window.sessionStorage.setItem("adaptest.session", "s9");
    installFetchRoutes([
      {
        method: "GET",
        path: /^\/sessions\/s9$/,
        handler: () => ({
          body: {
            session_id: "s9",
            examinee_id: "alice",
            phase: "finished",
            answered: 12,
            item: null,
            report: sampleReport,
          },
        }),
      },
    ]);
    await view().mount();
    expect(root.querySelector("[data-view=report]")).not.toBeNull();
  });

  it("falls back to the start form when the saved session is unknown", async () => {
    window.sessionStorage.setItem("adaptest.session", "gone");
    installFetchRoutes([
      {
        method: "GET",
        path: /^\/sessions\/gone$/,
        handler: () => ({ status: 404, body: { detail: "unknown session" } }),
      },
    ]);
    await view().mount();
    expect(root.querySelector("[data-view=start]")).not.toBeNull();
    expect(window.sessionStorage.getItem("adaptest.session")).toBeNull();
  });
});
