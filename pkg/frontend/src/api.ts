/** Typed client for the inference service. All numbers displayed anywhere in
 * the dashboard originate from these responses; the client never computes
 * model quantities itself. */

import type { GridResponse, ModelInfo, PredictRequest, PredictResponse } from "./types.js";

declare global {
  interface Window {
    TORNADO_DAMAGE_API?: string;
  }
}

export function apiBase(): string {
  if (typeof window !== "undefined" && window.TORNADO_DAMAGE_API) {
    return window.TORNADO_DAMAGE_API.replace(/\/$/, "");
  }
  return "";
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") {
      const extra = Array.isArray(body.features) ? `: ${body.features.join(", ")}` : "";
      return body.detail + extra;
    }
  } catch {
    // fall through to the generic message
  }
  return `service error (HTTP ${response.status})`;
}

export async function postPredict(request: PredictRequest): Promise<PredictResponse> {
  const response = await fetch(`${apiBase()}/api/v1/predict`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(request),
  });
  if (!response.ok) {
    throw new ServiceError(response.status, await errorMessage(response));
  }
  return (await response.json()) as PredictResponse;
}

export async function getGrid(year: number, month: number): Promise<GridResponse> {
  const response = await fetch(`${apiBase()}/api/v1/grid/${year}/${month}`);
  if (!response.ok) {
    throw new ServiceError(response.status, await errorMessage(response));
  }
  return (await response.json()) as GridResponse;
}

export async function getModelInfo(): Promise<ModelInfo> {
  const response = await fetch(`${apiBase()}/api/v1/model`);
  if (!response.ok) {
    throw new ServiceError(response.status, await errorMessage(response));
  }
  return (await response.json()) as ModelInfo;
}
