// Browser bootstrap: the only file that touches the real DOM.

import { PollApi } from "./api.js";
import { App, startPolling } from "./app.js";
import { ClientState } from "./state.js";

function mount(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const app = new App(new PollApi(""), new ClientState(window.localStorage));

  app.onRender = () => {
    const tabs =
      `<nav>` +
      (["grid", "forecast", "regions"] as const)
        .map(
          (name) =>
            `<button class="tab${app.view === name ? " active" : ""}" data-view="${name}">${name}</button>`,
        )
        .join("") +
      `</nav>`;
    const status = app.screens.status
      ? `<div class="status">${app.screens.status}</div>`
      : "";
    let body = "";
    if (app.view === "grid") body = app.screens.grid;
    if (app.view === "forecast")
      body = app.screens.priorPrompt + app.screens.methodSelector + app.screens.forecast;
    if (app.view === "regions") body = app.screens.regions;
    root.innerHTML = tabs + status + body;
  };

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const vote = target.closest<HTMLElement>("[data-party] button.vote");
    if (vote?.dataset.party) {
      void app.castVote(vote.dataset.party);
      return;
    }
    const prior = target.closest<HTMLElement>("button.prior");
    if (prior?.dataset.prior) {
      void app.answerPriorPrompt(prior.dataset.prior);
      return;
    }
    if (target.closest("button.prior-skip")) {
      void app.answerPriorPrompt(null);
      return;
    }
    const method = target.closest<HTMLElement>("button.method");
    if (method?.dataset.method) {
      void app.setMethod(method.dataset.method);
      return;
    }
    const tab = target.closest<HTMLElement>("button.tab");
    if (tab?.dataset.view) {
      app.view = tab.dataset.view as typeof app.view;
      if (app.view === "regions") void app.refreshRegions();
      app.onRender(app);
      return;
    }
    if (target.closest("button.retry")) {
      void app.init();
    }
  });

  void app.init();
  startPolling(app);
  window.addEventListener("online", () => void app.flushPending());
}

mount();
