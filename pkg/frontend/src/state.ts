import type { ConceptInfo } from "./api.js";

/** The only page sizes the selector offers. */
export const PAGE_SIZES = [10, 25, 50, 100] as const;

export type PageSize = (typeof PAGE_SIZES)[number];

export type UnitPreference = "mmol_per_L" | "mg_per_dL";

export interface ViewState {
  patientUuid: string | null;
  unitPreference: UnitPreference;
  tablePage: number;
  tableSize: PageSize;
  dateQuery: string | null;
  selectedTrends: Set<string>;
}

export function initialState(): ViewState {
  return {
    patientUuid: null,
    unitPreference: "mmol_per_L",
    tablePage: 1,
    tableSize: 10,
    dateQuery: null,
    selectedTrends: new Set(),
  };
}

export function isPageSize(n: number): n is PageSize {
  return (PAGE_SIZES as readonly number[]).includes(n);
}

/**
 * The mg/dL toggle covers the glucose and lipid panels only. HbA1c stays in
 * percent, and the renal tests stay in their own units, whatever the toggle
 * says.
 */
export function unitToggleApplies(concept: Pick<ConceptInfo, "analyte" | "profile">): boolean {
  return concept.analyte === "glucose" || concept.profile === "lipid";
}

/** Unit to request a trend series in, or undefined for the canonical unit. */
export function trendUnitParam(state: ViewState, concept: ConceptInfo): string | undefined {
  if (state.unitPreference === "mg_per_dL" && unitToggleApplies(concept)) {
    return "mg_per_dL";
  }
  return undefined;
}

const DATE_QUERY_PATTERN = /^(\d{4})-(\d{2})-(\d{2})$/;

/** True only for a well-formed YYYY-MM-DD that names a real calendar date. */
export function isValidDateQuery(text: string): boolean {
  const match = DATE_QUERY_PATTERN.exec(text);
  if (!match) return false;
  const year = Number(match[1]);
  const month = Number(match[2]);
  const day = Number(match[3]);
  if (month < 1 || month > 12) return false;
  const daysInMonth = new Date(Date.UTC(year, month, 0)).getUTCDate();
  return day >= 1 && day <= daysInMonth;
}
