// Admin console: item bank maintenance, termination settings, and exposure
// statistics. Guarded by the admin token; a 401 always falls back to the
// login prompt.

import { ApiClient, ApiError } from "./api";
import { guessingPrefill, validateItemDraft, type ItemDraft } from "./forms";
import { renderHistogram } from "./histogram";
import type { AdminItem } from "./types";

export class AdminView {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async mount(): Promise<void> {
    if (!this.api.adminToken) {
      this.renderLogin();
      return;
    }
    try {
      await this.api.getConfig();
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        this.api.adminToken = null;
        this.renderLogin("Invalid admin token.");
        return;
      }
      throw error;
    }
    await this.renderConsole();
  }

  private renderLogin(message = ""): void {
    this.root.innerHTML = `
      <section class="card" data-view="admin-login">
        <h2>Administration</h2>
        <form id="login-form">
          <label>Admin token
            <input type="password" id="admin-token" required />
          </label>
          <button type="submit">Sign in</button>
        </form>
        <p class="error" id="login-error">${message}</p>
      </section>`;
    this.root.querySelector("#login-form")!.addEventListener("submit", (event) => {
      event.preventDefault();
      const input = this.root.querySelector<HTMLInputElement>("#admin-token")!;
      this.api.adminToken = input.value;
      void this.mount();
    });
  }

  private async renderConsole(): Promise<void> {
    const config = await this.api.getConfig();
    const listing = await this.api.listItems();
    this.root.innerHTML = `
      <section class="card" data-view="admin-console">
        <h2>Administration</h2>
        <div class="admin-grid">
          <section data-panel="config">
            <h3>Termination settings</h3>
            <form id="config-form">
              <label>Max adaptive items
                <input type="number" id="cfg-max-items" min="1"
                       value="${config.termination.max_items}" />
              </label>
              <label>Min items
                <input type="number" id="cfg-min-items" min="1"
                       value="${config.termination.min_items}" />
              </label>
              <label>Standard error target (blank for none)
                <input type="number" step="0.01" id="cfg-se-threshold"
                       value="${config.termination.se_threshold ?? ""}" />
              </label>
              <label>Selection strategy
                <select id="cfg-strategy">
                  ${["best", "topk", "cluster"]
                    .map(
                      (kind) =>
                        `<option value="${kind}" ${
                          kind === config.strategy.kind ? "selected" : ""
                        }>${kind}</option>`,
                    )
                    .join("")}
                </select>
              </label>
              <button type="submit">Save settings</button>
            </form>
            <p id="config-status"></p>
          </section>
          <section data-panel="item-form">
            <h3>New item</h3>
            <form id="item-form">
              <label>Id <input id="item-id" required /></label>
              <label>Stem <textarea id="item-stem" required></textarea></label>
              <label>Options (one per line)
                <textarea id="item-options" rows="5"></textarea>
              </label>
              <label>Correct options (comma-separated indices from 0)
                <input id="item-correct" />
              </label>
              <label>Difficulty level (1 very easy .. 5 very difficult)
                <input type="number" id="item-level" min="1" max="5" value="3" />
              </label>
              <label>Topic <input id="item-topic" /></label>
              <label>Guessing parameter
                <input type="number" step="0.0001" id="item-guessing" readonly />
              </label>
              <button type="submit">Create item</button>
            </form>
            <ul class="error" id="item-errors"></ul>
          </section>
          <section data-panel="items">
            <h3>Item bank (<span id="item-count">${listing.items.length}</span>)</h3>
            <div id="item-list"></div>
          </section>
          <section data-panel="exposure">
            <h3>Item exposure</h3>
            <p id="exposure-summary"></p>
            <button id="exposure-refresh">Load exposure statistics</button>
            <div id="exposure-bars" class="bars"></div>
          </section>
        </div>
      </section>`;

    this.bindConfigForm();
    this.bindItemForm();
    this.renderItemList(listing.items);
    this.root
      .querySelector("#exposure-refresh")!
      .addEventListener("click", () => void this.refreshExposure());
  }

  private bindConfigForm(): void {
    const form = this.root.querySelector<HTMLFormElement>("#config-form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.saveConfig();
    });
  }

  private async saveConfig(): Promise<void> {
    const status = this.root.querySelector("#config-status")!;
    const maxItems = Number(
      this.root.querySelector<HTMLInputElement>("#cfg-max-items")!.value,
    );
    const minItems = Number(
      this.root.querySelector<HTMLInputElement>("#cfg-min-items")!.value,
    );
    const seRaw = this.root.querySelector<HTMLInputElement>("#cfg-se-threshold")!.value;
    const strategy = this.root.querySelector<HTMLSelectElement>("#cfg-strategy")!.value;
    const update: Record<string, unknown> = {
      max_items: maxItems,
      min_items: minItems,
      strategy_kind: strategy,
    };
    if (seRaw.trim() === "") {
      update.clear_se_threshold = true;
    } else {
      update.se_threshold = Number(seRaw);
    }
    try {
      const config = await this.api.updateConfig(update);
      status.textContent = `Saved; next sessions cap at ${config.termination.max_items} adaptive items.`;
    } catch (error) {
      status.textContent = describe(error);
    }
  }

  private draftFromForm(): ItemDraft {
    const optionsText = this.root.querySelector<HTMLTextAreaElement>("#item-options")!
      .value;
    const correctText = this.root.querySelector<HTMLInputElement>("#item-correct")!
      .value;
    return {
      id: this.root.querySelector<HTMLInputElement>("#item-id")!.value,
      stem: this.root.querySelector<HTMLTextAreaElement>("#item-stem")!.value,
      options: optionsText.split("\n").filter((line) => line.trim().length > 0),
      correctOptions: correctText
        .split(",")
        .map((part) => part.trim())
        .filter((part) => part.length > 0)
        .map(Number),
      difficultyLevel: Number(
        this.root.querySelector<HTMLInputElement>("#item-level")!.value,
      ),
    };
  }

  private bindItemForm(): void {
    const form = this.root.querySelector<HTMLFormElement>("#item-form")!;
    const refreshGuessing = () => {
      const guess = guessingPrefill(this.draftFromForm());
      const field = this.root.querySelector<HTMLInputElement>("#item-guessing")!;
      field.value = guess === null ? "" : String(guess);
    };
    form.addEventListener("input", refreshGuessing);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.createItem();
    });
  }

  private async createItem(): Promise<void> {
    const errorList = this.root.querySelector("#item-errors")!;
    const draft = this.draftFromForm();
    const problems = validateItemDraft(draft);
    if (problems.length > 0) {
      errorList.innerHTML = problems.map((p) => `<li>${p}</li>`).join("");
      return;
    }
    const payload = {
      id: draft.id.trim(),
      stem: draft.stem,
      options: draft.options,
      correct_options: draft.correctOptions,
      difficulty_level: draft.difficultyLevel,
      topic: this.root.querySelector<HTMLInputElement>("#item-topic")!.value,
    } as unknown as AdminItem;
    try {
      await this.api.createItem(payload);
      errorList.innerHTML = "";
      const listing = await this.api.listItems();
      this.root.querySelector("#item-count")!.textContent = String(
        listing.items.length,
      );
      this.renderItemList(listing.items);
    } catch (error) {
      // Mirror the server's 422 problem list verbatim.
      if (error instanceof ApiError && Array.isArray(error.detail)) {
        errorList.innerHTML = error.detail
          .map((problem) => `<li>${String(problem)}</li>`)
          .join("");
      } else {
        errorList.innerHTML = `<li>${describe(error)}</li>`;
      }
    }
  }

  private renderItemList(items: AdminItem[]): void {
    const container = this.root.querySelector("#item-list")!;
    container.innerHTML = `
      <table class="item-table">
        <thead>
          <tr><th>id</th><th>level</th><th>b</th><th>c</th><th>topic</th><th></th></tr>
        </thead>
        <tbody>
          ${items
            .slice(0, 200)
            .map(
              (item) => `
              <tr data-item="${item.id}">
                <td>${item.id}</td>
                <td>${item.difficulty_level}</td>
                <td>${item.b}</td>
                <td>${round4(item.c)}</td>
                <td>${item.topic}</td>
                <td><button class="delete-item" data-id="${item.id}">delete</button></td>
              </tr>`,
            )
            .join("")}
        </tbody>
      </table>`;
    container.querySelectorAll<HTMLButtonElement>(".delete-item").forEach((button) => {
      button.addEventListener("click", () => void this.deleteItem(button.dataset.id!));
    });
  }

  private async deleteItem(itemId: string): Promise<void> {
    const errorList = this.root.querySelector("#item-errors")!;
    try {
      await this.api.deleteItem(itemId);
      const listing = await this.api.listItems();
      this.root.querySelector("#item-count")!.textContent = String(listing.items.length);
      this.renderItemList(listing.items);
    } catch (error) {
      errorList.innerHTML = `<li>${describe(error)}</li>`;
    }
  }

  private async refreshExposure(): Promise<void> {
    const stats = await this.api.exposureStats();
    this.root.querySelector("#exposure-summary")!.textContent =
      `${stats.finished_sessions} finished sessions, ` +
      `frequency sigma ${stats.sigma.toFixed(2)}`;
    renderHistogram(
      this.root.querySelector<HTMLElement>("#exposure-bars")!,
      stats.counts,
    );
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `Request failed (${error.status}): ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}

function round4(value: number): number {
  return Math.round(value * 10000) / 10000;
}
