// The examinee flow: start a test, answer the adaptively chosen items one
// at a time, and read the final knowledge report. The server owns all test
// state; the browser only remembers the session id so a refresh can resume.

import { ApiClient, ApiError } from "./api";
import type { ItemView, Report } from "./types";

const SESSION_KEY = "adaptest.session";

const FINISH_LABELS: Record<string, string> = {
  max_items: "Maximum test length reached",
  theta_out_of_range: "Ability estimate left the measurable range",
  se_reached: "Target measurement precision reached",
  pool_exhausted: "No more items available",
};

export class ExamineeView {
  private sessionId: string | null = null;
  private current: ItemView | null = null;
  private inFlight = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly storage: Storage = window.sessionStorage,
  ) {}

  async mount(): Promise<void> {
    const saved = this.storage.getItem(SESSION_KEY);
    if (saved) {
      try {
        const state = await this.api.getSession(saved);
        this.sessionId = saved;
        if (state.report) {
          this.renderReport(state.report);
        } else if (state.item) {
          this.renderItem(state.item);
        } else {
          this.renderStart();
        }
        return;
      } catch {
        this.storage.removeItem(SESSION_KEY);
      }
    }
    this.renderStart();
  }

  private renderStart(message = ""): void {
    this.root.innerHTML = `
      <section class="card" data-view="start">
        <h2>Take an adaptive test</h2>
        <p>The test adapts to you: five warmup questions spanning every
        difficulty level, then items picked to measure your level quickly.</p>
        <form id="start-form">
          <label>Your name or id
            <input name="examinee" id="examinee-id" required minlength="1" />
          </label>
          <button type="submit" id="start-button">Start test</button>
        </form>
        <p class="error" id="start-error">${message}</p>
      </section>`;
    const form = this.root.querySelector<HTMLFormElement>("#start-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.root.querySelector<HTMLInputElement>("#examinee-id")!;
      void this.start(input.value.trim());
    });
  }

  private async start(examineeId: string): Promise<void> {
    if (!examineeId || this.inFlight) return;
    this.inFlight = true;
    try {
      const started = await this.api.startSession(examineeId);
      this.sessionId = started.session_id;
      this.storage.setItem(SESSION_KEY, started.session_id);
      this.renderItem(started.item);
    } catch (error) {
      this.renderStart(describe(error));
    } finally {
      this.inFlight = false;
    }
  }

  private renderItem(item: ItemView): void {
    this.current = item;
    const options = item.options
      .map(
        (text, index) => `
        <li>
          <label>
            <input type="checkbox" name="option" value="${index}" />
            <span>${escapeHtml(text)}</span>
          </label>
        </li>`,
      )
      .join("");
    this.root.innerHTML = `
      <section class="card" data-view="question" data-item-id="${item.item_id}">
        <header>
          <span class="badge" id="phase-banner">${
            item.phase === "warmup" ? "Warmup" : "Adaptive"
          }</span>
          <span id="progress">Question ${item.position}</span>
        </header>
        <h2 id="stem">${escapeHtml(item.stem)}</h2>
        <ul class="options" id="options">${options}</ul>
        <button id="submit-answer">Submit answer</button>
        <p class="error" id="answer-error"></p>
      </section>`;
    const button = this.root.querySelector<HTMLButtonElement>("#submit-answer")!;
    button.addEventListener("click", () => void this.submit());
  }

  private selectedOptions(): number[] {
    const boxes = this.root.querySelectorAll<HTMLInputElement>(
      'input[name="option"]:checked',
    );
    return Array.from(boxes, (box) => Number(box.value));
  }

  async submit(): Promise<void> {
    // One in-flight answer at a time; the button stays disabled until the
    // server has replied.
    if (this.inFlight || !this.sessionId || !this.current) return;
    const button = this.root.querySelector<HTMLButtonElement>("#submit-answer");
    this.inFlight = true;
    if (button) button.disabled = true;
    try {
      const outcome = await this.api.submitAnswer(
        this.sessionId,
        this.current.item_id,
        this.selectedOptions(),
      );
      if (outcome.status === "finished") {
        this.renderReport(outcome.report);
      } else {
        this.renderItem(outcome.item);
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 410) {
        await this.refreshFromServer();
      } else {
        const note = this.root.querySelector("#answer-error");
        if (note) note.textContent = describe(error);
        if (button) button.disabled = false;
      }
    } finally {
      this.inFlight = false;
    }
  }

  private async refreshFromServer(): Promise<void> {
    if (!this.sessionId) return;
    const state = await this.api.getSession(this.sessionId);
    if (state.report) this.renderReport(state.report);
    else if (state.item) this.renderItem(state.item);
  }

  private renderReport(report: Report): void {
    this.current = null;
    const levels = Object.entries(report.level_correct_ratios)
      .sort(([a], [b]) => Number(a) - Number(b))
      .map(
        ([level, ratio]) => `
        <tr>
          <td>Level ${level}</td>
          <td>${Math.round(ratio * 100)}% correct</td>
        </tr>`,
      )
      .join("");
    const se =
      report.standard_error === null ? "n/a" : report.standard_error.toFixed(2);
    this.root.innerHTML = `
      <section class="card" data-view="report">
        <h2>Your results</h2>
        <p id="finish-reason" data-reason="${report.finish_reason}">
          ${FINISH_LABELS[report.finish_reason] ?? report.finish_reason}
        </p>
        <dl>
          <dt>Ability score</dt><dd id="theta">${report.theta.toFixed(2)}</dd>
          <dt>Measurement error</dt><dd id="se">${se}</dd>
          <dt>Questions answered</dt><dd id="answered">${report.items.length}</dd>
        </dl>
        <h3>Knowledge report</h3>
        <table id="level-table"><tbody>${levels}</tbody></table>
        <button id="restart">Take another test</button>
      </section>`;
    this.root.querySelector("#restart")!.addEventListener("click", () => {
      this.storage.removeItem(SESSION_KEY);
      this.sessionId = null;
      this.renderStart();
    });
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `Request failed (${error.status}): ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
