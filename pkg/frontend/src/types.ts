/** Wire types mirroring the /api/v1 endpoints. */

export interface PredictRequest {
  lat: number;
  lon: number;
  datetime: string; // ISO 8601
  length?: number;
  width?: number;
  duration?: number;
  overrides?: Record<string, number>;
}

export interface PredictResponse {
  p_damage: number;
  conditional_transformed: number;
  conditional_usd: number;
  expected_usd: number;
  damage_flag: boolean;
  features: Record<string, number>;
}

export interface GridPoint {
  name: string;
  lat: number;
  lon: number;
  p_damage: number;
  conditional_usd: number;
  expected_usd: number;
}

export interface GridResponse {
  year: number;
  month: number;
  points: GridPoint[];
}

export interface ModelInfo {
  format_version: number;
  created: string;
  feature_count: number;
  feature_names: string[];
  training_meta: Record<string, unknown>;
}

export type GridMetric = "p_damage" | "conditional_usd";
