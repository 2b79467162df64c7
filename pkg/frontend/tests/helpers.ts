import { vi } from "vitest";
import type {
  ConceptInfo,
  RangesResponse,
  SummaryResponse,
  TableResponse,
  TrendResponse,
} from "../src/api.js";

export const PATIENT = "11111111-2222-3333-4444-555555555555";

export const CONCEPTS: ConceptInfo[] = [
  { uuid: "c-hba1c", name: "HbA1c", analyte: "hba1c", unit: "percent", profile: "glycemic", codes: [] },
  { uuid: "c-fpg", name: "FPG", analyte: "glucose", unit: "mmol_per_L", profile: "glycemic", codes: [] },
  { uuid: "c-tc", name: "Total cholesterol", analyte: "cholesterol", unit: "mmol_per_L", profile: "lipid", codes: [] },
  { uuid: "c-ldl", name: "LDL", analyte: "cholesterol", unit: "mmol_per_L", profile: "lipid", codes: [] },
  { uuid: "c-hdl", name: "HDL", analyte: "cholesterol", unit: "mmol_per_L", profile: "lipid", codes: [] },
  { uuid: "c-tg", name: "Triglycerides", analyte: "triglycerides", unit: "mmol_per_L", profile: "lipid", codes: [] },
  { uuid: "c-crea", name: "Creatinine", analyte: "creatinine", unit: "umol_per_L", profile: "renal", codes: [] },
  { uuid: "c-egfr", name: "eGFR", analyte: "egfr", unit: "mL_per_min_per_1_73m2", profile: "renal", codes: [] },
];

export const RANGES: RangesResponse = {
  clinic_timezone: "Asia/Kolkata",
  ehr_base_url: null,
  concepts: CONCEPTS,
  bands: CONCEPTS.map((c) => ({
    concept_uuid: c.uuid,
    unit: c.unit,
    intervals: [
      [0, 5.7, "green"],
      [5.7, 6.5, "yellow"],
      [6.5, "inf", "red"],
    ],
  })),
  conversions: [],
};

export const SUMMARY: SummaryResponse = {
  header: {
    patient_uuid: PATIENT,
    display_name: "Asha Verma",
    gender: "F",
    birthdate: "1970-02-11",
  },
  gauges: [
    {
      concept_uuid: "c-hba1c",
      name: "HbA1c",
      profile: "glycemic",
      value: 6.4,
      unit: "percent",
      obs_datetime: "2018-11-30T14:00:00+05:30",
      color: "yellow",
      band_index: 1,
      bands: [
        [0, 5.7, "green"],
        [5.7, 6.5, "yellow"],
        [6.5, "inf", "red"],
      ],
    },
    {
      concept_uuid: "c-fpg",
      name: "FPG",
      profile: "glycemic",
      value: 5.4,
      unit: "mmol_per_L",
      obs_datetime: "2018-11-30T09:01:00+05:30",
      color: "green",
      band_index: 0,
      bands: [
        [0, 5.6, "green"],
        [5.6, 7.0, "yellow"],
        [7.0, "inf", "red"],
      ],
    },
    {
      concept_uuid: "c-tc",
      name: "Total cholesterol",
      profile: "lipid",
      value: 4.9,
      unit: "mmol_per_L",
      obs_datetime: "2018-11-30T09:02:00+05:30",
      color: "green",
      band_index: 0,
      bands: [
        [0, 5.2, "green"],
        [5.2, 6.2, "yellow"],
        [6.2, "inf", "red"],
      ],
    },
    {
      concept_uuid: "c-ldl",
      name: "LDL",
      profile: "lipid",
      value: 2.4,
      unit: "mmol_per_L",
      obs_datetime: "2018-11-30T09:03:00+05:30",
      color: "green",
      band_index: 0,
      bands: [
        [0, 2.6, "green"],
        [2.6, 4.1, "yellow"],
        [4.1, "inf", "red"],
      ],
    },
    {
      concept_uuid: "c-tg",
      name: "Triglycerides",
      profile: "lipid",
      value: 2.5,
      unit: "mmol_per_L",
      obs_datetime: "2018-11-30T09:05:00+05:30",
      color: "red",
      band_index: 2,
      bands: [
        [0, 1.7, "green"],
        [1.7, 2.3, "yellow"],
        [2.3, "inf", "red"],
      ],
    },
    {
      concept_uuid: "c-crea",
      name: "Creatinine",
      profile: "renal",
      value: 112,
      unit: "umol_per_L",
      obs_datetime: "2018-11-30T09:06:00+05:30",
      color: "yellow",
      band_index: 1,
      bands: [
        [0, 110, "green"],
        [110, 130, "yellow"],
        [130, "inf", "red"],
      ],
    },
    {
      concept_uuid: "c-egfr",
      name: "eGFR",
      profile: "renal",
      value: 92,
      unit: "mL_per_min_per_1_73m2",
      obs_datetime: "2018-11-30T09:07:00+05:30",
      color: "green",
      band_index: 2,
      bands: [
        [0, 60, "red"],
        [60, 90, "yellow"],
        [90, "inf", "green"],
      ],
    },
  ],
  missing: ["c-hdl"],
  stale: false,
};

export const TABLE: TableResponse = {
  rows: [
    {
      visit_date: "2018-11-30",
      cells: {
        "c-hba1c": { value: 6.4, color: "yellow" },
        "c-fpg": { value: 5.4, color: "green" },
        "c-tg": { value: 2.5, color: "red" },
      },
    },
    {
      visit_date: "2018-10-31",
      cells: {
        "c-hba1c": { value: 6.9, color: "red" },
        "c-fpg": { value: 5.9, color: "yellow" },
      },
    },
  ],
  total_rows: 2,
  total_pages: 1,
  page: 1,
  size: 10,
  stale: false,
};

function series(conceptUuid: string, unit: string, values: number[]): TrendResponse {
  const months = ["June", "July", "August", "September", "October", "November"];
  return {
    concept_uuid: conceptUuid,
    unit,
    points: values.map((v, i) => {
      const month = String(6 + i).padStart(2, "0");
      return [`2018-${month}-28T09:00:00+05:30`, v] as [string, number];
    }),
    month_labels: months.slice(0, values.length),
    stale: false,
  };
}

export const TRENDS: Record<string, TrendResponse> = {
  "c-hba1c": series("c-hba1c", "percent", [9.1, 8.6, 8.0, 7.4, 6.9, 6.4]),
  "c-fpg": series("c-fpg", "mmol_per_L", [8.9, 8.1, 7.4, 6.4, 5.9, 5.4]),
  "c-tc": series("c-tc", "mmol_per_L", [6.6, 6.1, 5.8, 5.5, 5.1, 4.9]),
  "c-ldl": series("c-ldl", "mmol_per_L", [4.4, 4.0, 3.6, 3.2, 2.8, 2.4]),
  "c-hdl": series("c-hdl", "mmol_per_L", [0.9, 1.0, 1.2, 1.4, 1.6]),
  "c-tg": series("c-tg", "mmol_per_L", [3.0, 2.6, 2.2, 1.9, 1.6, 2.5]),
  "c-crea": series("c-crea", "umol_per_L", [134, 126, 119, 108, 104, 112]),
  "c-egfr": series("c-egfr", "mL_per_min_per_1_73m2", [55, 61, 68, 77, 85, 92]),
};

/** What the stub hands back for trend requests carrying unit=mg_per_dL. */
export const TRENDS_MG: Record<string, TrendResponse> = {
  "c-fpg": series("c-fpg", "mg_per_dL", [160.3, 145.9, 133.3, 115.3, 106.3, 97.3]),
  "c-tc": series("c-tc", "mg_per_dL", [255.2, 235.9, 224.3, 212.7, 197.2, 189.5]),
  "c-ldl": series("c-ldl", "mg_per_dL", [170.1, 154.7, 139.2, 123.7, 108.3, 92.8]),
  "c-hdl": series("c-hdl", "mg_per_dL", [34.8, 38.7, 46.4, 60.3, 71.9]),
  "c-tg": series("c-tg", "mg_per_dL", [265.7, 230.3, 194.9, 168.3, 141.7, 221.4]),
};

export interface FetchStub {
  calls: string[];
  restore(): void;
}

type Payloads = {
  ranges?: RangesResponse;
  summary?: SummaryResponse;
  table?: TableResponse | ((url: URL) => TableResponse);
  trends?: Record<string, TrendResponse>;
  trendsMg?: Record<string, TrendResponse>;
};

/**
 * Replaces global fetch with a recorder that serves canned payloads, so
 * every pixel the UI renders is traceable back to one of these objects.
 */
export function installFetch(overrides: Payloads = {}): FetchStub {
  const payloads = {
    ranges: overrides.ranges ?? RANGES,
    summary: overrides.summary ?? SUMMARY,
    table: overrides.table ?? TABLE,
    trends: overrides.trends ?? TRENDS,
    trendsMg: overrides.trendsMg ?? TRENDS_MG,
  };
  const calls: string[] = [];

  const stub = async (input: unknown): Promise<Response> => {
    const url = new URL(String(input), "http://dashboard.test");
    calls.push(url.pathname + url.search);
    const json = (body: unknown, status = 200) => {
      const text = JSON.stringify(body);
      return {
        ok: status >= 200 && status < 300,
        status,
        json: async () => JSON.parse(text),
      } as unknown as Response;
    };

    if (url.pathname === "/api/config/ranges") return json(payloads.ranges);
    if (url.pathname.endsWith("/summary")) return json(payloads.summary);
    if (url.pathname.endsWith("/table")) {
      const table = typeof payloads.table === "function" ? payloads.table(url) : payloads.table;
      return json(table);
    }
    if (url.pathname.endsWith("/trends")) {
      const concept = url.searchParams.get("concept") ?? "";
      const unit = url.searchParams.get("unit");
      const source = unit === "mg_per_dL" ? payloads.trendsMg : payloads.trends;
      const trend = source[concept] ?? payloads.trends[concept];
      if (!trend) return json({ code: "bad_request", message: "unknown concept" }, 400);
      return json(trend);
    }
    return json({ code: "bad_request", message: `no stub for ${url.pathname}` }, 404);
  };

  vi.stubGlobal("fetch", stub);
  return {
    calls,
    restore: () => vi.unstubAllGlobals(),
  };
}

export function freshRoot(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

/** Waits out the fetch-and-render chain kicked off by a UI event handler. */
export async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}
