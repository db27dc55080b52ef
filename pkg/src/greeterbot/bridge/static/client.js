// Protocol client for the bridge. Strictly the documented endpoints:
// GET /page, GET /events (server-sent events), POST /input, POST /confirm.
//
// The event subscription reconnects on stream loss by resyncing with
// GET /page and opening a fresh stream. Reconnection never touches /confirm;
// confirmations happen only on explicit user action.
import { parsePage } from "./model.js";
export class BridgeClient {
    constructor(baseUrl, options = {}) {
        this.base = baseUrl.replace(/\/$/, "");
        this.fetchFn = options.fetchFn ?? fetch;
        this.reconnectDelayMs = options.reconnectDelayMs ?? 250;
    }
    async getPage() {
        const resp = await this.fetchFn(`${this.base}/page`);
        if (!resp.ok)
            throw new Error(`GET /page failed: ${resp.status}`);
        return parsePage(await resp.json());
    }
    async postInput(value) {
        const resp = await this.fetchFn(`${this.base}/input`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ value }),
        });
        if (!resp.ok)
            throw new Error(`POST /input failed: ${resp.status}`);
    }
    async confirm() {
        const resp = await this.fetchFn(`${this.base}/confirm`, { method: "POST" });
        if (!resp.ok)
            throw new Error(`POST /confirm failed: ${resp.status}`);
    }
    /**
     * Push page updates to onPage until the returned stop function is called.
     * Every (re)connect starts with a GET /page resync so a lost stream can
     * never leave a stale page on screen.
     */
    subscribe(onPage) {
        let stopped = false;
        let controller = null;
        const loop = async () => {
            while (!stopped) {
                try {
                    onPage(await this.getPage());
                    controller = new AbortController();
                    const resp = await this.fetchFn(`${this.base}/events`, {
                        signal: controller.signal,
                    });
                    if (!resp.ok || resp.body === null) {
                        throw new Error(`GET /events failed: ${resp.status}`);
                    }
                    await this.readEvents(resp.body, onPage);
                }
                catch (err) {
                    if (stopped)
                        return;
                }
                if (!stopped) {
                    await new Promise((r) => setTimeout(r, this.reconnectDelayMs));
                }
            }
        };
        void loop();
        return () => {
            stopped = true;
            controller?.abort();
        };
    }
    async readEvents(body, onPage) {
        const reader = body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
            const { done, value } = await reader.read();
            if (done)
                return;
            buffer += decoder.decode(value, { stream: true });
            let end;
            while ((end = buffer.indexOf("\n\n")) >= 0) {
                const block = buffer.slice(0, end);
                buffer = buffer.slice(end + 2);
                for (const line of block.split("\n")) {
                    if (line.startsWith("data: ")) {
                        onPage(parsePage(JSON.parse(line.slice(6))));
                    }
                }
            }
        }
    }
}
