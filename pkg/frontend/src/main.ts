import {
  ApiError,
  fetchRanges,
  fetchSummary,
  fetchTable,
  fetchTrend,
  type ConceptInfo,
  type HeaderInfo,
} from "./api.js";
import { renderGaugeBoard } from "./gauges.js";
import { renderTable } from "./table.js";
import { renderTrendChart } from "./trends.js";
import {
  initialState,
  trendUnitParam,
  type PageSize,
  type UnitPreference,
  type ViewState,
} from "./state.js";

export interface AppController {
  root: HTMLElement;
  state: ViewState;
  concepts: ConceptInfo[];
  selectPatient(uuid: string): Promise<void>;
  refreshTable(): Promise<void>;
  refreshTrends(): Promise<void>;
  setUnitPreference(pref: UnitPreference): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function buildSkeleton(root: HTMLElement): void {
  root.textContent = "";
  const header = el("header", "app-header");
  header.appendChild(el("h1", undefined, "Diabetes Lab Dashboard"));
  const picker = el("div", "patient-picker");
  const input = el("input", "patient-input") as HTMLInputElement;
  input.placeholder = "patient uuid";
  const load = el("button", "patient-load", "Load");
  picker.append(input, load);
  header.appendChild(picker);
  header.appendChild(el("div", "offline-banner hidden", "offline: showing last synced results"));
  root.appendChild(header);

  const main = el("main");
  main.appendChild(el("section", "panel patient-header"));
  main.appendChild(el("section", "panel gauge-board"));

  const tablePanel = el("section", "panel table-panel");
  tablePanel.appendChild(el("h2", undefined, "Visits"));
  tablePanel.appendChild(el("div", "table-host"));
  main.appendChild(tablePanel);

  const trendsPanel = el("section", "panel trends-panel");
  trendsPanel.appendChild(el("h2", undefined, "Trends"));
  const controls = el("div", "trend-controls");
  const toggle = el("div", "unit-toggle");
  for (const [unit, label] of [
    ["mmol_per_L", "mmol/L"],
    ["mg_per_dL", "mg/dL"],
  ] as const) {
    const button = el("button", unit === "mmol_per_L" ? "active" : "", label);
    button.dataset.unit = unit;
    toggle.appendChild(button);
  }
  controls.appendChild(toggle);
  controls.appendChild(el("div", "trend-picker"));
  trendsPanel.appendChild(controls);
  trendsPanel.appendChild(el("div", "trend-charts"));
  main.appendChild(trendsPanel);
  root.appendChild(main);
}

function renderHeader(section: HTMLElement, header: HeaderInfo): void {
  section.textContent = "";
  const name = el("h2", "patient-name", header.display_name);
  const meta = el(
    "p",
    "patient-meta",
    `${header.gender} · born ${header.birthdate} · ${header.patient_uuid}`,
  );
  section.append(name, meta);
}

function renderError(section: HTMLElement, error: unknown): void {
  section.textContent = "";
  const message =
    error instanceof ApiError ? `${error.code}: ${error.message}` : "something went wrong";
  section.appendChild(el("p", "error-box", message));
}

export async function mountApp(root: HTMLElement): Promise<AppController> {
  buildSkeleton(root);
  const state = initialState();
  const ranges = await fetchRanges();
  const concepts = ranges.concepts;
  const staleSources = new Map<string, boolean>();

  const section = (selector: string) => root.querySelector(selector) as HTMLElement;
  const banner = section(".offline-banner");

  function noteStale(source: string, stale: boolean): void {
    staleSources.set(source, stale);
    let any = false;
    for (const flag of staleSources.values()) any = any || flag;
    banner.classList.toggle("hidden", !any);
  }

  async function loadSummary(): Promise<void> {
    const headerSection = section(".patient-header");
    const gaugeSection = section(".gauge-board");
    if (!state.patientUuid) return;
    try {
      const summary = await fetchSummary(state.patientUuid);
      renderHeader(headerSection, summary.header);
      renderGaugeBoard(gaugeSection, summary, concepts);
      noteStale("summary", summary.stale);
    } catch (error) {
      renderError(headerSection, error);
      gaugeSection.textContent = "";
    }
  }

  async function loadTable(): Promise<void> {
    const host = section(".table-host");
    if (!state.patientUuid) return;
    try {
      const table = await fetchTable(state.patientUuid, {
        page: state.tablePage,
        size: state.tableSize,
        date: state.dateQuery,
      });
      renderTable(host, table, concepts, state.dateQuery, {
        onPageChange(page: number) {
          state.tablePage = page;
          void loadTable();
        },
        onSizeChange(size: PageSize) {
          state.tableSize = size;
          state.tablePage = 1;
          void loadTable();
        },
        onDateQuery(date: string | null) {
          state.dateQuery = date;
          state.tablePage = 1;
          void loadTable();
        },
      });
      noteStale("table", table.stale);
    } catch (error) {
      renderError(host, error);
    }
  }

  function chartHost(conceptUuid: string): HTMLElement {
    const charts = section(".trend-charts");
    let host = charts.querySelector<HTMLElement>(`[data-concept="${conceptUuid}"]`);
    if (!host) {
      host = el("div", "trend-chart");
      host.dataset.concept = conceptUuid;
      charts.appendChild(host);
    }
    return host;
  }

  async function loadOneTrend(concept: ConceptInfo): Promise<void> {
    if (!state.patientUuid) return;
    const host = chartHost(concept.uuid);
    try {
      const trend = await fetchTrend(state.patientUuid, concept.uuid, trendUnitParam(state, concept));
      renderTrendChart(host, trend, concept.name);
      noteStale(`trend:${concept.uuid}`, trend.stale);
    } catch (error) {
      renderError(host, error);
    }
  }

  async function loadTrends(): Promise<void> {
    const charts = section(".trend-charts");
    for (const host of Array.from(charts.children) as HTMLElement[]) {
      if (!state.selectedTrends.has(host.dataset.concept ?? "")) {
        staleSources.delete(`trend:${host.dataset.concept}`);
        host.remove();
      }
    }
    const selected = concepts.filter((c) => state.selectedTrends.has(c.uuid));
    await Promise.allSettled(selected.map((concept) => loadOneTrend(concept)));
  }

  function buildTrendPicker(): void {
    const picker = section(".trend-picker");
    picker.textContent = "";
    for (const concept of concepts) {
      const label = el("label", "trend-choice");
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.checked = state.selectedTrends.has(concept.uuid);
      box.dataset.concept = concept.uuid;
      box.addEventListener("change", () => {
        if (box.checked) {
          state.selectedTrends.add(concept.uuid);
        } else {
          state.selectedTrends.delete(concept.uuid);
        }
        void loadTrends();
      });
      label.append(box, concept.name);
      picker.appendChild(label);
    }
  }

  async function setUnitPreference(pref: UnitPreference): Promise<void> {
    if (state.unitPreference === pref) return;
    state.unitPreference = pref;
    for (const button of section(".unit-toggle").querySelectorAll("button")) {
      button.classList.toggle("active", button.dataset.unit === pref);
    }
    await loadTrends();
  }

  async function selectPatient(uuid: string): Promise<void> {
    state.patientUuid = uuid;
    state.tablePage = 1;
    state.dateQuery = null;
    staleSources.clear();
    await Promise.allSettled([loadSummary(), loadTable(), loadTrends()]);
  }

  // every configured test charts by default; the picker narrows it
  for (const concept of concepts) state.selectedTrends.add(concept.uuid);
  buildTrendPicker();

  const input = section(".patient-input") as HTMLInputElement;
  section(".patient-load").addEventListener("click", () => {
    const uuid = input.value.trim();
    if (uuid) void selectPatient(uuid);
  });
  for (const button of section(".unit-toggle").querySelectorAll("button")) {
    button.addEventListener("click", () => {
      void setUnitPreference(button.dataset.unit as UnitPreference);
    });
  }

  return {
    root,
    state,
    concepts,
    selectPatient,
    refreshTable: loadTable,
    refreshTrends: loadTrends,
    setUnitPreference,
  };
}

const autoRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (autoRoot) {
  void mountApp(autoRoot);
}
