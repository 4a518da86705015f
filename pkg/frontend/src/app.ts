import { ApiClient, NetworkError } from "./api.js";
import { formatErrorRate, formatProgress, progressPercent } from "./format.js";
import { OfflineQueue, StorageLike } from "./queue.js";
import type { NextSample, ScorePayload, Summary } from "./types.js";

const NAME_KEY = "annotator.name";

type View =
  | { kind: "login" }
  | { kind: "review"; sample: NextSample }
  | { kind: "offline" }
  | { kind: "done"; summary: Summary | null }
  | { kind: "summary"; summary: Summary };

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** The whole page. All durable state lives on the server or in storage;
 * a hard refresh loses only the unsubmitted form. */
export class AnnotatorApp {
  private view: View = { kind: "login" };
  private score: 0 | 1 | null = null;
  private feedback = "";
  private formError = "";
  private notice = "";
  readonly queue: OfflineQueue;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
    private readonly storage: StorageLike,
    private readonly win: Window,
  ) {
    this.queue = new OfflineQueue(storage);
  }

  async start(): Promise<void> {
    this.win.addEventListener("online", () => {
      void this.syncPending();
    });
    this.win.document.addEventListener("keydown", (event) => {
      this.onKeydown(event);
    });
    if (this.annotator()) {
      await this.advance();
    } else {
      this.render();
    }
  }

  annotator(): string {
    return this.storage.getItem(NAME_KEY) ?? "";
  }

  // ------------------------------------------------------------------
  // flows
  // ------------------------------------------------------------------

  private async advance(): Promise<void> {
    try {
      const sample = await this.client.next(this.annotator());
      if (sample === null) {
        let summary: Summary | null = null;
        try {
          summary = await this.client.summary();
        } catch (err) {
          if (!(err instanceof NetworkError)) throw err;
        }
        this.view = { kind: "done", summary };
      } else {
        this.view = { kind: "review", sample };
      }
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
      this.view = { kind: "offline" };
    }
    this.render();
  }

  async submit(): Promise<void> {
    if (this.view.kind !== "review") return;
    if (this.score === null) {
      this.formError = "choose 1 (no errors) or 0 (has errors) first";
      this.render();
      return;
    }
    // the server would 422 anyway; block before any request goes out
    if (this.score === 0 && this.feedback.trim() === "") {
      this.formError = "a zero score requires feedback describing the problem";
      this.render();
      return;
    }
    const payload: ScorePayload = {
      dialogue_id: this.view.sample.dialogue_id,
      annotator: this.annotator(),
      score: this.score,
      feedback: this.feedback,
    };
    try {
      const outcome = await this.client.postScore(payload);
      if (outcome.kind === "invalid") {
        this.formError = outcome.message;
        this.render();
        return;
      }
      this.notice =
        outcome.kind === "duplicate"
          ? "someone already scored this dialogue; skipping forward"
          : "";
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
      this.queue.enqueue(payload);
      this.notice = "offline: score queued, it will sync when the connection returns";
    }
    this.resetForm();
    await this.advance();
  }

  setScore(value: 0 | 1): void {
    this.score = value;
    this.formError = "";
    this.render();
  }

  private resetForm(): void {
    this.score = null;
    this.feedback = "";
    this.formError = "";
  }

  async syncPending(): Promise<void> {
    if (this.queue.size() > 0) {
      try {
        const delivered = await this.queue.replay(this.client);
        if (delivered > 0) {
          this.notice = `back online: ${delivered} queued score(s) delivered`;
        }
      } catch (err) {
        if (!(err instanceof NetworkError)) throw err;
        return;
      }
    }
    if (this.view.kind === "offline" || this.view.kind === "done") {
      await this.advance();
    } else {
      this.render();
    }
  }

  async showSummary(): Promise<void> {
    try {
      const summary = await this.client.summary();
      this.view = { kind: "summary", summary };
      this.render();
    } catch (err) {
      if (!(err instanceof NetworkError)) throw err;
      this.notice = "offline: summary unavailable";
      this.render();
    }
  }

  private onKeydown(event: KeyboardEvent): void {
    if (this.view.kind !== "review") return;
    const target = event.target as HTMLElement | null;
    if (target && target.tagName === "TEXTAREA") {
      if (event.key === "Enter" && (event.ctrlKey || event.metaKey)) {
        event.preventDefault();
        void this.submit();
      }
      return;
    }
    if (event.key === "1") {
      this.setScore(1);
    } else if (event.key === "0") {
      this.setScore(0);
    } else if (event.key === "Enter") {
      event.preventDefault();
      void this.submit();
    }
  }

  // ------------------------------------------------------------------
  // rendering
  // ------------------------------------------------------------------

  render(): void {
    switch (this.view.kind) {
      case "login":
        this.renderLogin();
        break;
      case "review":
        this.renderReview(this.view.sample);
        break;
      case "offline":
        this.renderOffline();
        break;
      case "done":
        this.renderSummary(this.view.summary, true);
        break;
      case "summary":
        this.renderSummary(this.view.summary, false);
        break;
    }
  }

  private renderLogin(): void {
    this.root.innerHTML = `
      <div class="card">
        <h1>Dialogue review</h1>
        <p>Enter your annotator name to start scoring.</p>
        <input id="annotator-name" placeholder="annotator name">
        <button class="primary" id="login">start</button>
        <div class="form-error" id="form-error">${escapeHtml(this.formError)}</div>
      </div>`;
    const input = this.root.querySelector<HTMLInputElement>("#annotator-name")!;
    const begin = () => {
      const name = input.value.trim();
      if (!name) {
        this.formError = "a name is required";
        this.render();
        return;
      }
      this.storage.setItem(NAME_KEY, name);
      this.formError = "";
      void this.advance();
    };
    this.root.querySelector("#login")!.addEventListener("click", begin);
    input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") begin();
    });
  }

  private renderReview(sample: NextSample): void {
    const flags = sample.flags.length
      ? `<p>automatic checks flagged:</p>
         <ul class="flags">${sample.flags
           .map(
             (flag) =>
               `<li>${escapeHtml(flag.dimension)} (turn ${flag.turn_index}): ${escapeHtml(flag.detail)}</li>`,
           )
           .join("")}</ul>`
      : "";
    const pendingNote =
      this.queue.size() > 0 ? ` · ${this.queue.size()} queued offline` : "";
    this.root.innerHTML = `
      <div class="topbar">
        <h1>Dialogue review</h1>
        <div class="meta">${escapeHtml(this.annotator())} · ${formatProgress(
          sample.scored,
          sample.total,
        )}${pendingNote}</div>
      </div>
      <div class="card">
        <div class="meta">dialogue ${escapeHtml(sample.dialogue_id)} · position ${
          sample.position + 1
        } of ${sample.total}</div>
        <pre class="trace">${escapeHtml(sample.trace)}</pre>
        ${flags}
        <div class="scorebar">
          <button class="score${this.score === 1 ? " selected" : ""}" data-score="1">1 · no errors</button>
          <button class="score${this.score === 0 ? " selected" : ""}" data-score="0">0 · has errors</button>
        </div>
        <textarea id="feedback" placeholder="feedback, required for a zero score">${escapeHtml(
          this.feedback,
        )}</textarea>
        <div class="form-error" id="form-error">${escapeHtml(this.formError)}</div>
        <div class="notice" id="notice">${escapeHtml(this.notice)}</div>
        <div class="scorebar">
          <button class="primary" id="submit">submit</button>
          <button id="show-summary">summary</button>
        </div>
        <div class="kbd-hint"><kbd>1</kbd>/<kbd>0</kbd> to score,
          <kbd>Enter</kbd> to submit (<kbd>Ctrl</kbd>+<kbd>Enter</kbd> inside feedback)</div>
      </div>`;
    for (const button of this.root.querySelectorAll<HTMLButtonElement>(".score")) {
      button.addEventListener("click", () => {
        this.setScore(Number(button.dataset["score"]) as 0 | 1);
      });
    }
    this.root
      .querySelector<HTMLTextAreaElement>("#feedback")!
      .addEventListener("input", (event) => {
        this.feedback = (event.target as HTMLTextAreaElement).value;
      });
    this.root.querySelector("#submit")!.addEventListener("click", () => {
      void this.submit();
    });
    this.root.querySelector("#show-summary")!.addEventListener("click", () => {
      void this.showSummary();
    });
  }

  private renderOffline(): void {
    const queued = this.queue.size();
    this.root.innerHTML = `
      <div class="card">
        <h1>Connection lost</h1>
        <p>The annotation service is unreachable.
           ${queued > 0 ? `${queued} score(s) are queued and will sync automatically.` : ""}</p>
        <div class="notice" id="notice">${escapeHtml(this.notice)}</div>
        <button class="primary" id="retry">retry</button>
      </div>`;
    this.root.querySelector("#retry")!.addEventListener("click", () => {
      void this.syncPending();
    });
  }

  private renderSummary(summary: Summary | null, done: boolean): void {
    if (summary === null) {
      this.root.innerHTML = `
        <div class="card">
          <h1>${done ? "All sampled dialogues reviewed" : "Summary"}</h1>
          <p>The summary is unavailable while offline.</p>
          <div class="notice" id="notice">${escapeHtml(this.notice)}</div>
          <button class="primary" id="retry">retry</button>
        </div>`;
      this.root.querySelector("#retry")!.addEventListener("click", () => {
        void this.syncPending();
      });
      return;
    }
    const rows = Object.entries(summary.dimension_counts)
      .map(
        ([dimension, count]) =>
          `<tr><td>${escapeHtml(dimension)}</td><td>${count}</td></tr>`,
      )
      .join("");
    const feedback = summary.feedback.length
      ? `<p>feedback collected:</p>
         <ul class="feedback">${summary.feedback
           .map((text) => `<li>${escapeHtml(text)}</li>`)
           .join("")}</ul>`
      : "";
    this.root.innerHTML = `
      <div class="card">
        <h1>${done ? "All sampled dialogues reviewed" : "Review progress"}</h1>
        <div class="meta" id="progress">${formatProgress(summary.scored, summary.sampled)}</div>
        <div class="progress-track">
          <div class="progress-fill" style="width: ${progressPercent(
            summary.scored,
            summary.sampled,
          )}%"></div>
        </div>
        <div class="rate" id="rate">${escapeHtml(formatErrorRate(summary))}</div>
        <table class="dimensions" id="dimension-table">
          <thead><tr><th>dimension</th><th>dialogues</th></tr></thead>
          <tbody>${rows}</tbody>
        </table>
        ${feedback}
        <div class="notice" id="notice">${escapeHtml(this.notice)}</div>
        ${done ? "" : '<button id="back">back to review</button>'}
      </div>`;
    const back = this.root.querySelector("#back");
    if (back) {
      back.addEventListener("click", () => {
        void this.advance();
      });
    }
  }
}
