// View state for the tablet surface. Renders only what the bridge pushed
// (no optimistic updates); typed input survives a failed submission.
export class TabletViewModel {
    constructor(client) {
        this.client = client;
        this.page = { mode: "blank" };
        this.draft = "";
        this.error = "";
        this.submitting = false;
        this.listeners = [];
    }
    get view() {
        return {
            mode: this.page.mode,
            text: "text" in this.page ? this.page.text : "",
            prompt: this.page.mode === "input" ? this.page.prompt : "",
            draft: this.draft,
            error: this.error,
            submitting: this.submitting,
        };
    }
    onChange(listener) {
        this.listeners.push(listener);
    }
    notify() {
        const snapshot = this.view;
        for (const listener of this.listeners)
            listener(snapshot);
    }
    start() {
        return this.client.subscribe((page) => this.applyPage(page));
    }
    applyPage(page) {
        this.page = page;
        if (page.mode !== "input") {
            this.error = "";
        }
        this.notify();
    }
    setDraft(text) {
        this.draft = text;
        this.notify();
    }
    /** POST the draft, then confirm; the field clears only on acknowledgment. */
    async submit() {
        if (this.submitting)
            return false;
        this.submitting = true;
        this.error = "";
        this.notify();
        try {
            await this.client.postInput(this.draft);
            await this.client.confirm();
            this.draft = "";
            return true;
        }
        catch (err) {
            this.error = err instanceof Error ? err.message : String(err);
            return false; // draft kept for retry
        }
        finally {
            this.submitting = false;
            this.notify();
        }
    }
}
