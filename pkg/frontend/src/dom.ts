// DOM binding: one container, four surfaces. Browser-only; all logic lives in
// the view model so the protocol behavior is testable headlessly.

import { TabletView, TabletViewModel } from "./viewmodel.js";

export function bind(vm: TabletViewModel, root: HTMLElement): void {
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
  const caption = root.querySelector(".caption") as HTMLElement;
  const captionText = root.querySelector(".caption-text") as HTMLElement;
  const processing = root.querySelector(".processing") as HTMLElement;
  const processingText = root.querySelector(".processing-text") as HTMLElement;
  const inputBox = root.querySelector(".input") as HTMLElement;
  const prompt = root.querySelector(".prompt") as HTMLElement;
  const field = root.querySelector("input") as HTMLInputElement;
  const button = root.querySelector("button") as HTMLButtonElement;
  const error = root.querySelector(".error") as HTMLElement;

  field.addEventListener("input", () => vm.setDraft(field.value));
  button.addEventListener("click", () => void vm.submit());
  field.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void vm.submit(); // Enter maps to the same confirm
  });

  vm.onChange((view: TabletView) => {
    caption.classList.toggle("hidden", view.mode !== "caption");
    processing.classList.toggle("hidden", view.mode !== "processing");
    inputBox.classList.toggle("hidden", view.mode !== "input");
    captionText.textContent = view.text;
    processingText.textContent = view.text;
    prompt.textContent = view.prompt;
    error.textContent = view.error;
    button.disabled = view.submitting;
    if (field.value !== view.draft) field.value = view.draft;
  });
}
