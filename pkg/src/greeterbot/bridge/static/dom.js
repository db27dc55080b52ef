// DOM binding: one container, four surfaces. Browser-only; all logic lives in
// the view model so the protocol behavior is testable headlessly.
export function bind(vm, root) {
    root.innerHTML = `
    <div class="caption hidden"><p class="caption-text"></p></div>
    <div class="processing hidden"><div class="spinner"></div><p class="processing-text"></p></div>
    <div class="input hidden">
      <p class="prompt"></p>
      <input type="text" autocomplete="off" />
      <button type="button">Confirm</button>
      <p class="error"></p>
    </div>
  `;
    const caption = root.querySelector(".caption");
    const captionText = root.querySelector(".caption-text");
    const processing = root.querySelector(".processing");
    const processingText = root.querySelector(".processing-text");
    const inputBox = root.querySelector(".input");
    const prompt = root.querySelector(".prompt");
    const field = root.querySelector("input");
    const button = root.querySelector("button");
    const error = root.querySelector(".error");
    field.addEventListener("input", () => vm.setDraft(field.value));
    button.addEventListener("click", () => void vm.submit());
    field.addEventListener("keydown", (ev) => {
        if (ev.key === "Enter")
            void vm.submit(); // Enter maps to the same confirm
    });
    vm.onChange((view) => {
        caption.classList.toggle("hidden", view.mode !== "caption");
        processing.classList.toggle("hidden", view.mode !== "processing");
        inputBox.classList.toggle("hidden", view.mode !== "input");
        captionText.textContent = view.text;
        processingText.textContent = view.text;
        prompt.textContent = view.prompt;
        error.textContent = view.error;
        button.disabled = view.submitting;
        if (field.value !== view.draft)
            field.value = view.draft;
    });
}
