// View state for the tablet surface. Renders only what the bridge pushed
// (no optimistic updates); typed input survives a failed submission.

import { BridgeClient } from "./client.js";
import { PageModel } from "./model.js";

export interface TabletView {
  mode: PageModel["mode"];
  text: string;
  prompt: string;
  draft: string;
  error: string;
  submitting: boolean;
}

export class TabletViewModel {
  private page: PageModel = { mode: "blank" };
  private draft = "";
  private error = "";
  private submitting = false;
  private listeners: Array<(view: TabletView) => void> = [];

  constructor(private readonly client: BridgeClient) {}

  get view(): TabletView {
    return {
      mode: this.page.mode,
      text: "text" in this.page ? this.page.text : "",
      prompt: this.page.mode === "input" ? this.page.prompt : "",
      draft: this.draft,
      error: this.error,
      submitting: this.submitting,
    };
  }

  onChange(listener: (view: TabletView) => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    const snapshot = this.view;
    for (const listener of this.listeners) listener(snapshot);
  }

  start(): () => void {
    return this.client.subscribe((page) => this.applyPage(page));
  }

  applyPage(page: PageModel): void {
    this.page = page;
    if (page.mode !== "input") {
      this.error = "";
    }
    this.notify();
  }

  setDraft(text: string): void {
    this.draft = text;
    this.notify();
  }

  /** POST the draft, then confirm; the field clears only on acknowledgment. */
  async submit(): Promise<boolean> {
    if (this.submitting) return false;
    this.submitting = true;
    this.error = "";
    this.notify();
    try {
      await this.client.postInput(this.draft);
      await this.client.confirm();
      this.draft = "";
      return true;
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
      return false; // draft kept for retry
    } finally {
      this.submitting = false;
      this.notify();
    }
  }
}
