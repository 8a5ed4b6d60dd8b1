/** Scenario cards: the request echo plus the service response, verbatim.
 * Formatting happens only at render time; the stored numbers are exactly
 * what the service returned. */

import type { PredictRequest, PredictResponse } from "./types.js";

export interface ScenarioCard {
  id: number;
  request: PredictRequest;
  response: PredictResponse;
  submittedAt: string;
}

let nextId = 1;

export function makeCard(request: PredictRequest, response: PredictResponse, now?: Date): ScenarioCard {
  return {
    id: nextId++,
    request,
    response,
    submittedAt: (now ?? new Date()).toISOString(),
  };
}

export const TRAY_CAPACITY = 8;

/** Comparison tray: newest first, capped FIFO (oldest evicted). */
export class Tray {
  cards: ScenarioCard[] = [];

  add(card: ScenarioCard): void {
    this.cards.unshift(card);
    if (this.cards.length > TRAY_CAPACITY) {
      this.cards.length = TRAY_CAPACITY;
    }
  }

  remove(id: number): void {
    this.cards = this.cards.filter((c) => c.id !== id);
  }

  clear(): void {
    this.cards = [];
  }
}

export function formatUsd(value: number): string {
  return value.toLocaleString("en-US", {
    style: "currency",
    currency: "USD",
    maximumFractionDigits: 0,
  });
}

export function formatProbability(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}
