/** DOM wiring. Everything below is presentation: values shown come verbatim
 * from service responses held by the App controller. */

import { App } from "./app.js";
import { formatProbability, formatUsd, ScenarioCard } from "./cards.js";
import { colorScale, hitTest, project, Projected } from "./map.js";
import type { GridMetric, GridResponse } from "./types.js";
import { FieldErrors, FormState } from "./validate.js";

const MAP_WIDTH = 760;
const MAP_HEIGHT = 360;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

let projected: Projected[] = [];

function renderErrors(errors: FieldErrors): void {
  for (const field of ["lat", "lon", "date", "time", "length", "width", "duration"] as const) {
    const message = errors[field] ?? "";
    el<HTMLElement>(`error-${field}`).textContent = message;
  }
  el<HTMLButtonElement>("submit").disabled = Object.keys(errors).length > 0;
}

function renderForm(form: FormState): void {
  for (const field of ["lat", "lon", "date", "time", "length", "width", "duration"] as const) {
    const input = el<HTMLInputElement>(`field-${field}`);
    if (input.value !== form[field]) input.value = form[field];
  }
}

function cardHtml(card: ScenarioCard): string {
  const r = card.response;
  const flag = r.damage_flag
    ? '<span class="badge damage">damage expected</span>'
    : '<span class="badge no-damage">no damage expected</span>';
  const when = card.request.datetime.replace("T", " ");
  return `
    <div class="card" data-id="${card.id}">
      <div class="card-head">
        <span>(${card.request.lat.toFixed(2)}, ${card.request.lon.toFixed(2)}) ${when}</span>
        <button class="card-close" data-id="${card.id}" title="remove">x</button>
      </div>
      <div class="gauge"><div class="gauge-fill" style="width: ${r.p_damage * 100}%"></div></div>
      <dl>
        <dt>P(damage)</dt><dd>${formatProbability(r.p_damage)}</dd>
        <dt>conditional</dt><dd>${formatUsd(r.conditional_usd)}</dd>
        <dt>expected</dt><dd>${formatUsd(r.expected_usd)}</dd>
      </dl>
      ${flag}
    </div>`;
}

function renderTray(cards: ScenarioCard[], app: App): void {
  const tray = el<HTMLElement>("tray");
  tray.innerHTML = cards.map(cardHtml).join("");
  for (const button of tray.querySelectorAll<HTMLButtonElement>(".card-close")) {
    button.addEventListener("click", () => app.removeCard(Number(button.dataset.id)));
  }
}

function renderGrid(grid: GridResponse | null, metric: GridMetric): void {
  const svg = el<HTMLElement>("map");
  const legend = el<HTMLElement>("legend");
  const empty = el<HTMLElement>("grid-empty");
  projected = [];
  if (!grid || grid.points.length === 0) {
    svg.innerHTML = "";
    legend.textContent = "";
    return;
  }
  empty.textContent = "";
  const scale = colorScale(grid.points, metric);
  const markers: string[] = [];
  for (const point of grid.points) {
    const p = project(point, MAP_WIDTH, MAP_HEIGHT);
    projected.push(p);
    const isCity = point.name !== "";
    markers.push(
      `<circle cx="${p.x.toFixed(1)}" cy="${p.y.toFixed(1)}" r="${isCity ? 5 : 3.5}" ` +
        `fill="${scale.color(point[metric])}" stroke="${isCity ? "#333" : "none"}">` +
        `<title>${point.name || "grid point"} (${point.lat.toFixed(2)}, ${point.lon.toFixed(2)}) ` +
        `P=${formatProbability(point.p_damage)} cond=${formatUsd(point.conditional_usd)}</title>` +
        `</circle>`,
    );
  }
  svg.innerHTML = markers.join("");
  const fmt = metric === "p_damage" ? formatProbability : formatUsd;
  legend.textContent = `${metric === "p_damage" ? "probability of damage" : "conditional damage"}: ` +
    `${fmt(scale.min)} (light) to ${fmt(scale.max)} (dark)`;
}

function wire(): void {
  const app = new App({
    onFormChanged: (form, errors) => {
      renderForm(form);
      renderErrors(errors);
    },
    onCardAdded: (_card, cards) => renderTray(cards, app),
    onTrayChanged: (cards) => renderTray(cards, app),
    onBanner: (message) => {
      const banner = el<HTMLElement>("banner");
      banner.textContent = message ?? "";
      banner.style.display = message ? "block" : "none";
    },
    onGrid: (grid, metric) => renderGrid(grid, metric),
    onGridEmpty: (message) => {
      el<HTMLElement>("grid-empty").textContent = message;
    },
  });

  for (const field of ["lat", "lon", "date", "time", "length", "width", "duration"] as const) {
    el<HTMLInputElement>(`field-${field}`).addEventListener("input", (event) => {
      app.setField(field, (event.target as HTMLInputElement).value);
    });
  }
  // sliders shadow the storm-dimension inputs both ways
  for (const field of ["length", "width", "duration"] as const) {
    const slider = el<HTMLInputElement>(`slider-${field}`);
    slider.addEventListener("input", () => app.setField(field, slider.value));
    el<HTMLInputElement>(`field-${field}`).addEventListener("input", (event) => {
      const value = Number((event.target as HTMLInputElement).value);
      if (Number.isFinite(value)) slider.value = String(value);
    });
  }
  el<HTMLButtonElement>("submit").addEventListener("click", () => void app.submitScenario());
  el<HTMLElement>("banner").addEventListener("click", () => {
    el<HTMLElement>("banner").style.display = "none";
  });

  const svg = el<HTMLElement>("map");
  svg.addEventListener("click", (event) => {
    const rect = svg.getBoundingClientRect();
    const x = ((event.clientX - rect.left) / rect.width) * MAP_WIDTH;
    const y = ((event.clientY - rect.top) / rect.height) * MAP_HEIGHT;
    const hit = hitTest(projected, x, y);
    if (hit) {
      app.setLocation(hit.point.lat, hit.point.lon);
    }
  });

  el<HTMLSelectElement>("grid-month").addEventListener("change", (event) => {
    const month = Number((event.target as HTMLSelectElement).value);
    void app.loadGrid(app.gridYear, month);
  });
  el<HTMLSelectElement>("grid-metric").addEventListener("change", (event) => {
    app.setMetric((event.target as HTMLSelectElement).value as GridMetric);
  });

  const advanced = el<HTMLElement>("advanced-toggle");
  advanced.addEventListener("click", () => {
    const panel = el<HTMLElement>("advanced-panel");
    panel.style.display = panel.style.display === "none" ? "block" : "none";
  });
  el<HTMLButtonElement>("add-override").addEventListener("click", () => {
    const name = el<HTMLInputElement>("override-name").value.trim();
    const value = el<HTMLInputElement>("override-value").value;
    if (name) {
      app.setOverride(name, value);
      renderOverrides(app);
    }
  });

  function renderOverrides(a: App): void {
    const list = el<HTMLElement>("override-list");
    list.innerHTML = Object.entries(a.form.overrides)
      .map(
        ([name, value]) =>
          `<li>${name} = ${value} <button data-name="${name}" class="override-remove">x</button></li>`,
      )
      .join("");
    for (const button of list.querySelectorAll<HTMLButtonElement>(".override-remove")) {
      button.addEventListener("click", () => {
        a.setOverride(button.dataset.name ?? "", "");
        renderOverrides(a);
      });
    }
  }

  renderForm(app.form);
  renderErrors({});
  void app.loadGrid(app.gridYear, app.gridMonth);
}

document.addEventListener("DOMContentLoaded", wire);
