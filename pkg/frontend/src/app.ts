import { ApiClient, ApiError, type CreateOptions } from "./api.js";
import { selectionForClick, selectionForDrag, spanOf } from "./selection.js";
import type { ApplicableRule, Marked, SessionState, StepEntry } from "./types.js";

/** The interactive solving view.
 *
 * All logic lives on the service: the view renders the printed formula with
 * the service's span layout, relays marks and steps, and mirrors verdicts
 * into history badges verbatim. Correctness rejections (HTTP 400) only show
 * a message; the history never changes on them.
 */
export class SolverApp {
  state: SessionState | null = null;
  applicable: ApplicableRule[] = [];
  private dragFrom: number | null = null;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
  ) {
    root.innerHTML = `
      <div class="status"><span class="stage"></span><span class="phase"></span></div>
      <div class="formula"></div>
      <div class="rules"></div>
      <div class="inputrow" hidden>
        <input class="replacement" placeholder="replacement for the marked part">
        <button class="submit">replace</button>
      </div>
      <div class="controls">
        <button class="undo">undo</button>
        <button class="export">export</button>
      </div>
      <ol class="history"></ol>
      <div class="message"></div>`;
    this.el(".formula").addEventListener("mousedown", (e) => {
      this.dragFrom = this.offsetOf(e.target);
    });
    this.el(".formula").addEventListener("mouseup", (e) => {
      const from = this.dragFrom;
      const to = this.offsetOf(e.target);
      this.dragFrom = null;
      if (to === null) return;
      if (from !== null && from !== to) void this.dragAcross(from, to);
      else void this.clickAt(to);
    });
    this.el(".undo").addEventListener("click", () => void this.undo());
    this.el(".export").addEventListener("click", () => void this.download());
    this.el(".submit").addEventListener("click", () => {
      const box = this.el<HTMLInputElement>(".replacement");
      void this.typeInput(box.value);
    });
  }

  private el<T extends HTMLElement = HTMLElement>(sel: string): T {
    return this.root.querySelector(sel) as T;
  }

  private offsetOf(target: EventTarget | null): number | null {
    const off = (target as HTMLElement | null)?.dataset?.off;
    return off === undefined ? null : Number(off);
  }

  async start(opts: CreateOptions): Promise<void> {
    this.state = await this.client.createSession(opts);
    this.applicable = [];
    this.render();
  }

  // ------------------------------------------------------------------ marks

  async clickAt(offset: number): Promise<void> {
    if (!this.state) return;
    const sel = selectionForClick(this.state.layout, offset, this.state.marked);
    if (sel) await this.markSelection(sel);
  }

  async dragAcross(a: number, b: number): Promise<void> {
    if (!this.state) return;
    const sel = selectionForDrag(this.state.layout, a, b);
    if (sel) await this.markSelection(sel);
  }

  async markSelection(sel: Marked): Promise<void> {
    if (!this.state) return;
    try {
      const resp = await this.client.mark(this.state.id, sel);
      this.state = resp.state;
      this.applicable = resp.applicable;
      this.message("");
    } catch (e) {
      this.message(e instanceof ApiError ? `not a subformula: ${e.message}` : String(e));
    }
    this.render();
  }

  // ------------------------------------------------------------------ steps

  async applyRule(rule: number, params?: { member?: number; vars?: string[] }): Promise<void> {
    if (!this.state) return;
    if (params === undefined) params = this.defaultParams(rule);
    try {
      const resp = await this.client.applyRule(this.state.id, rule, params);
      this.state = resp.state;
      this.applicable = [];
      this.message(resp.verdict?.clue ?? "");
    } catch (e) {
      this.message(e instanceof ApiError ? `correction required: ${e.message}` : String(e));
    }
    this.render();
  }

  /** Menu default: distribute over the first candidate, add every variable. */
  private defaultParams(rule: number): { member?: number; vars?: string[] } | undefined {
    const entry = this.applicable.find((r) => r.rule === rule);
    if (!entry) return undefined;
    if (entry.params.member?.length) return { member: entry.params.member[0] };
    if (entry.params.vars?.length) return { vars: entry.params.vars };
    return undefined;
  }

  async typeInput(text: string): Promise<void> {
    if (!this.state) return;
    try {
      const resp = await this.client.inputFormula(this.state.id, text);
      this.state = resp.state;
      this.applicable = [];
      this.el<HTMLInputElement>(".replacement").value = "";
      this.message("");
    } catch (e) {
      this.message(e instanceof ApiError ? `correction required: ${e.message}` : String(e));
    }
    this.render();
  }

  async undo(): Promise<void> {
    if (!this.state) return;
    try {
      const resp = await this.client.undo(this.state.id);
      this.state = resp.state;
      this.applicable = [];
      this.message("");
    } catch (e) {
      this.message(e instanceof ApiError ? e.message : String(e));
    }
    this.render();
  }

  async exportText(): Promise<string> {
    if (!this.state) throw new Error("no session");
    return await this.client.exportAttempt(this.state.id);
  }

  private async download(): Promise<void> {
    const text = await this.exportText();
    const a = this.root.ownerDocument.createElement("a");
    a.href = `data:application/json;charset=utf-8,${encodeURIComponent(text)}`;
    a.download = `${this.state!.task_id}.json`;
    a.click();
  }

  // ----------------------------------------------------------------- render

  private message(text: string): void {
    this.el(".message").textContent = text;
  }

  render(): void {
    const s = this.state;
    if (!s) return;
    this.el(".stage").textContent = `stage ${s.stage}`;
    this.el(".phase").textContent = s.completed ? "completed" : s.phase.toLowerCase();

    const doc = this.root.ownerDocument;
    const box = this.el(".formula");
    box.textContent = "";
    const [selStart, selEnd] = s.marked ? spanOf(s.layout, s.marked) : [-1, -1];
    for (let i = 0; i < s.layout.text.length; i++) {
      const ch = doc.createElement("span");
      ch.textContent = s.layout.text[i];
      ch.dataset.off = String(i);
      if (selStart <= i && i < selEnd) ch.className = "sel";
      box.appendChild(ch);
    }

    const rules = this.el(".rules");
    rules.textContent = "";
    if (s.mode === "RULE") {
      for (const entry of this.applicable) {
        const b = doc.createElement("button");
        b.className = "rule";
        b.dataset.rule = String(entry.rule);
        b.textContent = `${entry.rule} ${entry.name}`;
        b.addEventListener("click", () => void this.applyRule(entry.rule));
        rules.appendChild(b);
      }
    }
    this.el(".inputrow").hidden = s.mode !== "INPUT" || s.marked === null;

    const history = this.el(".history");
    history.textContent = "";
    for (const step of s.steps) {
      history.appendChild(this.historyRow(doc, step));
    }
  }

  private historyRow(doc: Document, step: StepEntry): HTMLElement {
    const li = doc.createElement("li");
    const text = doc.createElement("span");
    text.className = "row-formula";
    text.textContent = step.op === "undo" ? "(step taken back)" : step.formula ?? "";
    li.appendChild(text);
    const badgeText = step.op === "undo" ? "UNDO" : step.verdict ? (step.verdict.ok ? "OK" : step.verdict.error) : null;
    if (badgeText) {
      const badge = doc.createElement("span");
      badge.className = `badge ${badgeText === "OK" ? "badge-ok" : badgeText === "UNDO" ? "badge-undo" : "badge-error"}`;
      badge.textContent = badgeText;
      if (step.verdict?.message) badge.title = step.verdict.message;
      li.appendChild(badge);
    }
    return li;
  }

  /** Badge text per history row, in order; null where no badge is shown. */
  badges(): (string | null)[] {
    return Array.from(this.el(".history").children).map((li) => {
      const badge = li.querySelector(".badge");
      return badge ? badge.textContent : null;
    });
  }
}

export function createApp(root: HTMLElement, client: ApiClient): SolverApp {
  return new SolverApp(root, client);
}
