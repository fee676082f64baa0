import { ApiError, PollApi } from "./api.js";
import { ClientState } from "./state.js";
import {
  MethodChoice,
  methodChoices,
  renderForecast,
  renderForecastUnavailable,
  renderMethodSelector,
  renderPartyGrid,
  renderPriorPrompt,
  renderRegions,
  renderRetry,
} from "./render.js";
import type { PartiesResponse, VoteSubmission } from "./types.js";

export interface Screens {
  grid: string;
  priorPrompt: string;
  methodSelector: string;
  forecast: string;
  regions: string;
  status: string;
}

export type ScreenName = "grid" | "forecast" | "regions";

/**
 * The client controller. Keeps no numbers of its own: everything shown is a
 * re-render of the latest API responses held in ClientState.
 */
export class App {
  readonly screens: Screens = {
    grid: "",
    priorPrompt: "",
    methodSelector: "",
    forecast: "",
    regions: "",
    status: "",
  };
  view: ScreenName = "grid";
  method = "raw";
  parties: PartiesResponse | null = null;
  submitting = false;
  onRender: (app: App) => void = () => {};

  constructor(
    readonly api: PollApi,
    readonly state: ClientState,
  ) {}

  private render(): void {
    const parties = this.parties;
    this.screens.grid = parties
      ? renderPartyGrid(parties.parties, this.state.selection)
      : renderRetry("parties");
    this.screens.methodSelector = renderMethodSelector(this.choices(), this.method);
    const forecast = this.state.lastForecast;
    if (forecast && parties) {
      const stale = this.screens.forecast !== "" && this.lastMark === forecast.high_water;
      this.screens.forecast = renderForecast(forecast, parties.parties, { stale });
      this.lastMark = forecast.high_water;
    }
    this.onRender(this);
  }

  private lastMark = -1;

  choices(): MethodChoice[] {
    const groupIds: string[] = [];
    for (const party of this.parties?.parties ?? []) {
      for (const tag of party.group_tags) {
        if (!groupIds.includes(tag)) groupIds.push(tag);
      }
    }
    return methodChoices(groupIds.sort());
  }

  async init(): Promise<void> {
    try {
      this.parties = await this.api.getParties();
      this.screens.status = "";
    } catch {
      this.parties = null;
      this.screens.status = "parties unavailable";
    }
    this.render();
  }

  /** Vote flow: submit (or queue when offline), then show the forecast. */
  async castVote(partyCode: string): Promise<void> {
    if (this.submitting) return;
    this.state.selection = partyCode;
    const submission: VoteSubmission = {
      device_id: this.state.deviceToken,
      party: partyCode,
    };
    if (this.state.priorStatus.kind === "disclosed") {
      submission.prior_party = this.state.priorStatus.code;
    }
    if (this.state.region) {
      submission.region = this.state.region;
    }
    this.submitting = true;
    try {
      await this.api.submitVote(submission);
      this.screens.status = "";
      this.view = "forecast";
      if (this.state.priorStatus.kind === "undisclosed" && this.parties) {
        this.screens.priorPrompt = renderPriorPrompt(
          this.parties.prior_parties,
          this.parties.abstention_code,
        );
      }
      await this.refreshForecast();
    } catch (error) {
      if (error instanceof ApiError) {
        // rejected by the service: keep the selection, surface the message
        this.screens.status = `vote rejected: ${error.message}`;
      } else {
        // offline: keep it queued, selection stays visible
        this.state.queueVote({
          party: submission.party,
          prior_party: submission.prior_party,
          region: submission.region,
        });
        this.screens.status = "offline: vote queued, will retry";
      }
      this.render();
    } finally {
      this.submitting = false;
    }
  }

  /** Flush queued submissions after connectivity returns. */
  async flushPending(): Promise<void> {
    for (const pending of this.state.takePending()) {
      try {
        await this.api.submitVote({ device_id: this.state.deviceToken, ...pending });
        this.screens.status = "";
      } catch (error) {
        if (!(error instanceof ApiError)) {
          this.state.queueVote(pending); // still offline, keep it
          return;
        }
        this.screens.status = `queued vote rejected: ${error.message}`;
      }
    }
    await this.refreshForecast();
  }

  /** Prior-vote prompt outcome; skipping never blocks anything. */
  async answerPriorPrompt(code: string | null): Promise<void> {
    this.screens.priorPrompt = "";
    if (code === null) {
      this.state.setPriorStatus({ kind: "skipped" });
      this.render();
      return;
    }
    this.state.setPriorStatus({ kind: "disclosed", code });
    if (this.state.selection) {
      // re-submit the current vote so the disclosure attaches to it
      await this.castVote(this.state.selection);
    } else {
      this.render();
    }
  }

  async setMethod(method: string): Promise<void> {
    this.method = method;
    await this.refreshForecast();
  }

  async refreshForecast(): Promise<void> {
    try {
      const forecast = await this.api.getForecast(this.method);
      if (this.state.acceptForecast(forecast)) {
        this.screens.status = "";
      } else {
        this.screens.status = "forecast rejected: seats do not fill the house";
      }
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.screens.forecast = renderForecastUnavailable(
          error.message,
          this.method !== "raw",
        );
        this.onRender(this);
        return;
      }
      this.screens.status = "forecast unavailable, will retry";
    }
    this.render();
  }

  async refreshRegions(): Promise<void> {
    try {
      const stats = await this.api.getRegionStats();
      this.screens.regions = this.parties
        ? renderRegions(stats, this.parties.parties)
        : renderRetry("regions");
    } catch {
      this.screens.regions = renderRetry("regions");
    }
    this.onRender(this);
  }
}

export const DEFAULT_POLL_INTERVAL_MS = 15_000;

/** Periodic forecast refresh; returns the stopper. */
export function startPolling(
  app: App,
  intervalMs: number = DEFAULT_POLL_INTERVAL_MS,
): () => void {
  const timer = setInterval(() => {
    void app.flushPending();
    void app.refreshForecast();
  }, intervalMs);
  return () => clearInterval(timer);
}
