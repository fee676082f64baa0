// Pure view functions: state in, HTML string out. No fetching, no math
// beyond presentation; every number shown comes from one API response.

import type { ForecastResponse, PartyInfo, RegionStatsResponse } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function partyLink(party: PartyInfo): string {
  // The registry carries no party URLs; link out to a web search instead.
  const query = encodeURIComponent(party.display_name);
  return `https://duckduckgo.com/?q=${query}`;
}

export function renderPartyGrid(parties: PartyInfo[], selected: string | null): string {
  if (parties.length === 0) {
    return `<p class="empty">No parties are configured for this election.</p>`;
  }
  const tiles = parties
    .map((party) => {
      const cls = party.code === selected ? "tile selected" : "tile";
      return (
        `<div class="${cls}" data-party="${escapeHtml(party.code)}">` +
        `<button class="vote" data-party="${escapeHtml(party.code)}">` +
        `${escapeHtml(party.display_name)}</button>` +
        `<a class="info" href="${partyLink(party)}" target="_blank" rel="noopener">info</a>` +
        `</div>`
      );
    })
    .join("");
  return `<div class="party-grid">${tiles}</div>`;
}

export function renderPriorPrompt(
  priorParties: PartyInfo[],
  abstentionCode: string,
): string {
  const options = priorParties
    .map(
      (party) =>
        `<button class="prior" data-prior="${escapeHtml(party.code)}">` +
        `${escapeHtml(party.display_name)}</button>`,
    )
    .join("");
  return (
    `<div class="prior-prompt">` +
    `<p>Which party did you vote for in the previous election?</p>` +
    `${options}` +
    `<button class="prior" data-prior="${escapeHtml(abstentionCode)}">I did not vote</button>` +
    `<button class="prior-skip" data-prior-skip="1">Skip</button>` +
    `</div>`
  );
}

export interface MethodChoice {
  id: string; // "raw" | "standardized" | "fixed:AY,YH"
  label: string;
}

export function methodChoices(groupIds: string[]): MethodChoice[] {
  const choices: MethodChoice[] = [
    { id: "raw", label: "Raw" },
    { id: "standardized", label: "Standardized" },
  ];
  const lengths = [...new Set([1, Math.max(groupIds.length - 1, 1), groupIds.length])];
  for (const length of lengths) {
    if (groupIds.length === 0) break;
    const subset = groupIds.slice(0, length);
    choices.push({ id: `fixed:${subset.join(",")}`, label: `Fixed: ${subset.join(",")}` });
  }
  return choices;
}

export function renderMethodSelector(choices: MethodChoice[], active: string): string {
  const buttons = choices
    .map((choice) => {
      const cls = choice.id === active ? "method active" : "method";
      return `<button class="${cls}" data-method="${escapeHtml(choice.id)}">${escapeHtml(choice.label)}</button>`;
    })
    .join("");
  return `<div class="method-selector">${buttons}</div>`;
}

export function renderForecast(
  forecast: ForecastResponse,
  parties: PartyInfo[],
  options: { stale?: boolean } = {},
): string {
  const names = new Map(parties.map((p) => [p.code, p.display_name]));
  const rows = Object.entries(forecast.seats)
    .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]))
    .map(([code, seats]) => {
      const width = forecast.house_size > 0 ? (seats / forecast.house_size) * 100 : 0;
      return (
        `<div class="bar-row" data-party="${escapeHtml(code)}">` +
        `<span class="name">${escapeHtml(names.get(code) ?? code)}</span>` +
        `<span class="bar" style="width:${width.toFixed(1)}%"></span>` +
        `<span class="seats" data-seats="${seats}">${seats}</span>` +
        `</div>`
      );
    })
    .join("");
  const staleBadge = options.stale ? `<span class="stale">not updated</span>` : "";
  return (
    `<div class="forecast">` +
    `<div class="forecast-meta">` +
    `<span class="sample">devices: ${forecast.sample.total_devices}, ` +
    `with prior: ${forecast.sample.prior_devices}</span>` +
    `<span class="mark">as of event #${forecast.high_water}</span>${staleBadge}` +
    `</div>` +
    `<div class="bars">${rows}</div>` +
    `</div>`
  );
}

export function renderForecastUnavailable(message: string, rawOffered: boolean): string {
  const hint = rawOffered
    ? `<button class="method" data-method="raw">Show the raw count instead</button>`
    : "";
  return `<div class="forecast-unavailable"><p>${escapeHtml(message)}</p>${hint}</div>`;
}

export function renderRegions(stats: RegionStatsResponse, parties: PartyInfo[]): string {
  const names = new Map(parties.map((p) => [p.code, p.display_name]));
  const regions = Object.keys(stats.regions).sort((a, b) => {
    if (a === "unknown") return 1;
    if (b === "unknown") return -1;
    return a.localeCompare(b);
  });
  if (regions.length === 0) {
    return `<p class="empty">No votes yet.</p>`;
  }
  const blocks = regions
    .map((region) => {
      const counts = stats.regions[region];
      const total = Object.values(counts).reduce((s, n) => s + n, 0);
      const label = region === "unknown" ? "Unknown region" : region;
      const items = Object.entries(counts)
        .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]))
        .map(
          ([code, count]) =>
            `<li>${escapeHtml(names.get(code) ?? code)}: ${count}</li>`,
        )
        .join("");
      return (
        `<div class="region" data-region="${escapeHtml(region)}">` +
        `<h3>${escapeHtml(label)} (${total})</h3><ul>${items}</ul></div>`
      );
    })
    .join("");
  return `<div class="regions" data-total="${stats.total_devices}">${blocks}</div>`;
}

export function renderRetry(what: string): string {
  return (
    `<div class="load-error"><p>Could not load ${escapeHtml(what)}.</p>` +
    `<button class="retry" data-retry="${escapeHtml(what)}">Retry</button></div>`
  );
}
