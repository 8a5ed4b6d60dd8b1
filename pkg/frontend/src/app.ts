/** DOM-free application controller: owns the form state, the comparison
 * tray, the grid cache, and all service traffic. main.ts binds it to the
 * document; tests drive it directly with a stubbed fetch. */

import { getGrid, postPredict, ServiceError } from "./api.js";
import { makeCard, ScenarioCard, Tray } from "./cards.js";
import type { GridMetric, GridResponse } from "./types.js";
import { emptyForm, FieldErrors, FormState, toRequest, validate } from "./validate.js";

export interface AppEvents {
  onFormChanged?(form: FormState, errors: FieldErrors): void;
  onCardAdded?(card: ScenarioCard, tray: ScenarioCard[]): void;
  onTrayChanged?(tray: ScenarioCard[]): void;
  onBanner?(message: string | null): void;
  onGrid?(grid: GridResponse | null, metric: GridMetric): void;
  onGridEmpty?(message: string): void;
}

export class App {
  form: FormState = emptyForm();
  errors: FieldErrors = {};
  tray = new Tray();
  metric: GridMetric = "p_damage";
  gridYear = 2019;
  gridMonth = 5;
  private gridCache = new Map<string, GridResponse>();
  private inFlight = false;

  constructor(private events: AppEvents = {}) {}

  setField(name: keyof Omit<FormState, "overrides">, value: string): void {
    this.form[name] = value;
    this.errors = validate(this.form);
    this.events.onFormChanged?.(this.form, this.errors);
  }

  setOverride(feature: string, value: string): void {
    if (value.trim() === "") {
      delete this.form.overrides[feature];
    } else {
      this.form.overrides[feature] = value;
    }
    this.errors = validate(this.form);
    this.events.onFormChanged?.(this.form, this.errors);
  }

  /** Map click or grid-point click: pre-fill the form's location. */
  setLocation(lat: number, lon: number): void {
    this.form.lat = String(lat);
    this.form.lon = String(lon);
    this.errors = validate(this.form);
    this.events.onFormChanged?.(this.form, this.errors);
  }

  /** Validate, then POST exactly one request; invalid forms never reach the
   * network. Returns the new card, or null when blocked. */
  async submitScenario(): Promise<ScenarioCard | null> {
    this.errors = validate(this.form);
    if (Object.keys(this.errors).length > 0) {
      this.events.onFormChanged?.(this.form, this.errors);
      return null;
    }
    if (this.inFlight) return null; // one request at a time
    this.inFlight = true;
    try {
      const request = toRequest(this.form);
      const response = await postPredict(request);
      const card = makeCard(request, response);
      this.tray.add(card);
      this.events.onBanner?.(null);
      this.events.onCardAdded?.(card, this.tray.cards);
      return card;
    } catch (error) {
      const message =
        error instanceof ServiceError ? error.message : `request failed: ${String(error)}`;
      this.events.onBanner?.(message);
      return null;
    } finally {
      this.inFlight = false;
    }
  }

  removeCard(id: number): void {
    this.tray.remove(id);
    this.events.onTrayChanged?.(this.tray.cards);
  }

  setMetric(metric: GridMetric): void {
    this.metric = metric;
    const cached = this.gridCache.get(`${this.gridYear}-${this.gridMonth}`);
    this.events.onGrid?.(cached ?? null, this.metric);
  }

  /** Fetch (or reuse) one month of grid predictions. */
  async loadGrid(year: number, month: number): Promise<GridResponse | null> {
    this.gridYear = year;
    this.gridMonth = month;
    const key = `${year}-${month}`;
    const cached = this.gridCache.get(key);
    if (cached) {
      this.events.onGrid?.(cached, this.metric);
      return cached;
    }
    try {
      const grid = await getGrid(year, month);
      this.gridCache.set(key, grid);
      this.events.onGrid?.(grid, this.metric);
      return grid;
    } catch (error) {
      if (error instanceof ServiceError && error.status === 404) {
        this.events.onGridEmpty?.(
          `no precomputed predictions for ${year}-${String(month).padStart(2, "0")}; ` +
            "run the grid command on the server",
        );
      } else {
        this.events.onBanner?.(
          error instanceof ServiceError ? error.message : `grid fetch failed: ${String(error)}`,
        );
      }
      this.events.onGrid?.(null, this.metric);
      return null;
    }
  }
}
