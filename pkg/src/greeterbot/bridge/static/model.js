// Page model mirrored from the bridge's GET /page and /events payloads.
export function parsePage(raw) {
    if (typeof raw !== "object" || raw === null || !("mode" in raw)) {
        throw new Error(`not a page payload: ${JSON.stringify(raw)}`);
    }
    const data = raw;
    switch (data.mode) {
        case "caption":
            return {
                mode: "caption",
                text: String(data.text ?? ""),
                shown_at: Number(data.shown_at ?? 0),
            };
        case "processing":
            return { mode: "processing", text: String(data.text ?? "") };
        case "input":
            return { mode: "input", prompt: String(data.prompt ?? "") };
        case "blank":
            return { mode: "blank" };
        default:
            throw new Error(`unknown page mode: ${String(data.mode)}`);
    }
}
