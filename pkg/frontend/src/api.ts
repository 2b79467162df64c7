/**
 * Typed access to the four dashboard endpoints. This module is the only
 * place the UI talks to the network; everything rendered on screen comes
 * out of one of these response shapes.
 */

export type BandColor = "green" | "yellow" | "red";

/** Band upper bounds serialize as a number or the string "inf". */
export type BandEdge = number | "inf";

export interface HeaderInfo {
  patient_uuid: string;
  display_name: string;
  gender: string;
  birthdate: string;
}

export interface GaugeInfo {
  concept_uuid: string;
  name: string;
  profile: string;
  value: number;
  unit: string;
  obs_datetime: string;
  color: BandColor;
  band_index: number;
  bands: [number, BandEdge, BandColor][];
}

export interface SummaryResponse {
  header: HeaderInfo;
  gauges: GaugeInfo[];
  missing: string[];
  stale: boolean;
}

export interface TableCell {
  value: number;
  color: BandColor | null;
}

export interface TableRow {
  visit_date: string;
  cells: Record<string, TableCell>;
}

export interface TableResponse {
  rows: TableRow[];
  total_rows: number;
  total_pages: number;
  page: number;
  size: number;
  stale: boolean;
}

export interface TrendResponse {
  concept_uuid: string;
  unit: string;
  points: [string, number][];
  month_labels: string[];
  stale: boolean;
}

export interface ConceptInfo {
  uuid: string;
  name: string;
  analyte: string;
  unit: string;
  profile: string;
  codes: [string, string][];
}

export interface BandSpecInfo {
  concept_uuid: string;
  unit: string;
  intervals: [BandEdge, BandEdge, BandColor][];
}

export interface RangesResponse {
  clinic_timezone: string;
  ehr_base_url: string | null;
  concepts: ConceptInfo[];
  bands: BandSpecInfo[];
  conversions: unknown[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function getJson<T>(path: string): Promise<T> {
  const response = await fetch(path);
  if (!response.ok) {
    let code = "internal";
    let message = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      if (body.code) code = body.code;
      if (body.message) message = body.message;
    } catch {
      // non-JSON error body, keep the generic message
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export function fetchSummary(patientUuid: string): Promise<SummaryResponse> {
  return getJson(`/api/patients/${encodeURIComponent(patientUuid)}/summary`);
}

export interface TableQuery {
  page: number;
  size: number;
  date?: string | null;
}

export function fetchTable(patientUuid: string, query: TableQuery): Promise<TableResponse> {
  const params = new URLSearchParams({ page: String(query.page), size: String(query.size) });
  if (query.date) params.set("date", query.date);
  return getJson(`/api/patients/${encodeURIComponent(patientUuid)}/table?${params}`);
}

export function fetchTrend(
  patientUuid: string,
  conceptUuid: string,
  unit?: string,
): Promise<TrendResponse> {
  const params = new URLSearchParams({ concept: conceptUuid });
  if (unit) params.set("unit", unit);
  return getJson(`/api/patients/${encodeURIComponent(patientUuid)}/trends?${params}`);
}

export function fetchRanges(): Promise<RangesResponse> {
  return getJson("/api/config/ranges");
}
