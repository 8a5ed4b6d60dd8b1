/** Scenario form model and validation. A request is only dispatched when
 * every field validates; invalid fields block submission with inline
 * messages and never reach the network. */

import type { PredictRequest } from "./types.js";

export interface FormState {
  lat: string;
  lon: string;
  date: string; // YYYY-MM-DD
  time: string; // HH:MM
  length: string; // blank = leave at training mean
  width: string;
  duration: string;
  overrides: Record<string, string>;
}

export type FieldErrors = Partial<Record<keyof FormState | "overrides", string>> & {
  overrideFields?: Record<string, string>;
};

export function emptyForm(): FormState {
  return {
    lat: "39.0",
    lon: "-94.6",
    date: "2019-05-15",
    time: "17:30",
    length: "",
    width: "",
    duration: "",
    overrides: {},
  };
}

function parseNumber(text: string): number | undefined {
  if (text.trim() === "") return undefined;
  const value = Number(text);
  return Number.isFinite(value) ? value : NaN;
}

export function validate(form: FormState): FieldErrors {
  const errors: FieldErrors = {};
  const lat = parseNumber(form.lat);
  if (lat === undefined || Number.isNaN(lat)) errors.lat = "latitude is required";
  else if (lat < -90 || lat > 90) errors.lat = "latitude must be in [-90, 90]";
  const lon = parseNumber(form.lon);
  if (lon === undefined || Number.isNaN(lon)) errors.lon = "longitude is required";
  else if (lon < -180 || lon > 180) errors.lon = "longitude must be in [-180, 180]";
  if (!/^\d{4}-\d{2}-\d{2}$/.test(form.date)) errors.date = "date must be YYYY-MM-DD";
  if (!/^\d{2}:\d{2}$/.test(form.time)) errors.time = "time must be HH:MM";

  for (const key of ["length", "width", "duration"] as const) {
    const value = parseNumber(form[key]);
    if (value !== undefined && (Number.isNaN(value) || value < 0)) {
      errors[key] = `${key} must be a nonnegative number`;
    }
  }
  const overrideFields: Record<string, string> = {};
  for (const [name, text] of Object.entries(form.overrides)) {
    const value = parseNumber(text);
    if (value === undefined || Number.isNaN(value)) {
      overrideFields[name] = "must be a number";
    }
  }
  if (Object.keys(overrideFields).length > 0) {
    errors.overrides = "override values must be numbers";
    errors.overrideFields = overrideFields;
  }
  return errors;
}

export function isValid(form: FormState): boolean {
  return Object.keys(validate(form)).length === 0;
}

/** Form -> wire request. Call only after validate() returns no errors. */
export function toRequest(form: FormState): PredictRequest {
  const request: PredictRequest = {
    lat: Number(form.lat),
    lon: Number(form.lon),
    datetime: `${form.date}T${form.time}`,
  };
  for (const key of ["length", "width", "duration"] as const) {
    const value = parseNumber(form[key]);
    if (value !== undefined) request[key] = value;
  }
  const overrides: Record<string, number> = {};
  for (const [name, text] of Object.entries(form.overrides)) {
    overrides[name] = Number(text);
  }
  if (Object.keys(overrides).length > 0) request.overrides = overrides;
  return request;
}

/** Wire request -> form (used when loading a card back for editing).
 * toRequest(fromRequest(r)) reproduces r exactly. */
export function fromRequest(request: PredictRequest): FormState {
  const [date, time] = request.datetime.split("T");
  const overrides: Record<string, string> = {};
  for (const [name, value] of Object.entries(request.overrides ?? {})) {
    overrides[name] = String(value);
  }
  return {
    lat: String(request.lat),
    lon: String(request.lon),
    date,
    time: time?.slice(0, 5) ?? "",
    length: request.length === undefined ? "" : String(request.length),
    width: request.width === undefined ? "" : String(request.width),
    duration: request.duration === undefined ? "" : String(request.duration),
    overrides,
  };
}
