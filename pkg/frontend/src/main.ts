import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

/** Browser bootstrap: a small start form, then the solving view. */

function boot(): void {
  const base = (document.querySelector("#base") as HTMLInputElement).value || "";
  const formula = (document.querySelector("#start-formula") as HTMLInputElement).value;
  const mode = (document.querySelector("#mode") as HTMLSelectElement).value as "RULE" | "INPUT";
  const feedback = (document.querySelector("#feedback") as HTMLInputElement).checked;
  const client = new ApiClient(base);
  const app = createApp(document.querySelector("#app") as HTMLElement, client);
  const opts = formula.trim()
    ? { formula: formula.trim(), mode, feedback }
    : { generate: { seed: Math.floor(Math.random() * 1e6) }, mode, feedback };
  app
    .start(opts)
    .then(() => {
      (document.querySelector("#start") as HTMLElement).hidden = true;
    })
    .catch((e) => {
      (document.querySelector("#start-error") as HTMLElement).textContent = String(e?.message ?? e);
    });
}

document.querySelector("#go")?.addEventListener("click", boot);
