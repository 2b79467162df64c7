/** Display helpers. Nothing here computes; it only restyles server values. */

const UNIT_LABELS: Record<string, string> = {
  mmol_per_L: "mmol/L",
  mg_per_dL: "mg/dL",
  percent: "%",
  mmol_per_mol: "mmol/mol",
  umol_per_L: "µmol/L",
  mL_per_min_per_1_73m2: "mL/min/1.73m²",
};

export function unitLabel(unit: string): string {
  return UNIT_LABELS[unit] ?? unit;
}

/** The value exactly as the server sent it, as text. */
export function valueText(value: number): string {
  return String(value);
}

export function datetimeLabel(iso: string): string {
  return iso.replace("T", " ").slice(0, 16);
}
