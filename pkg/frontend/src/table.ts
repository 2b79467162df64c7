import type { ConceptInfo, TableResponse } from "./api.js";
import { valueText } from "./format.js";
import { PAGE_SIZES, isPageSize, isValidDateQuery, type PageSize } from "./state.js";

export interface TableHandlers {
  onPageChange(page: number): void;
  onSizeChange(size: PageSize): void;
  onDateQuery(date: string | null): void;
}

function buildControls(
  table: TableResponse,
  dateQuery: string | null,
  handlers: TableHandlers,
): HTMLElement {
  const bar = document.createElement("div");
  bar.className = "table-controls";

  const dateInput = document.createElement("input");
  dateInput.type = "text";
  dateInput.className = "date-input";
  dateInput.placeholder = "YYYY-MM-DD";
  dateInput.value = dateQuery ?? "";

  const dateError = document.createElement("span");
  dateError.className = "date-error hidden";
  dateError.textContent = "enter a date as YYYY-MM-DD";

  const search = document.createElement("button");
  search.className = "date-search";
  search.textContent = "Search date";
  search.addEventListener("click", () => {
    const text = dateInput.value.trim();
    if (text === "") {
      dateError.classList.add("hidden");
      handlers.onDateQuery(null);
      return;
    }
    if (!isValidDateQuery(text)) {
      dateError.classList.remove("hidden");
      return;
    }
    dateError.classList.add("hidden");
    handlers.onDateQuery(text);
  });

  const clear = document.createElement("button");
  clear.className = "date-clear";
  clear.textContent = "Clear";
  clear.addEventListener("click", () => {
    dateInput.value = "";
    dateError.classList.add("hidden");
    handlers.onDateQuery(null);
  });

  const sizeSelect = document.createElement("select");
  sizeSelect.className = "size-select";
  for (const step of PAGE_SIZES) {
    const option = document.createElement("option");
    option.value = String(step);
    option.textContent = String(step);
    option.selected = step === table.size;
    sizeSelect.appendChild(option);
  }
  sizeSelect.addEventListener("change", () => {
    const size = Number(sizeSelect.value);
    if (isPageSize(size)) handlers.onSizeChange(size);
  });

  const prev = document.createElement("button");
  prev.className = "page-prev";
  prev.textContent = "Prev";
  prev.disabled = table.page <= 1;
  prev.addEventListener("click", () => handlers.onPageChange(table.page - 1));

  const next = document.createElement("button");
  next.className = "page-next";
  next.textContent = "Next";
  next.disabled = table.page >= table.total_pages;
  next.addEventListener("click", () => handlers.onPageChange(table.page + 1));

  const position = document.createElement("span");
  position.className = "page-position";
  position.textContent = `Page ${table.page} of ${Math.max(table.total_pages, 1)} (${table.total_rows} visits)`;

  bar.append(dateInput, search, clear, dateError, sizeSelect, prev, position, next);
  return bar;
}

/** Rows come newest-first from the server and are rendered in that order. */
export function renderTable(
  container: HTMLElement,
  table: TableResponse,
  concepts: ConceptInfo[],
  dateQuery: string | null,
  handlers: TableHandlers,
): void {
  container.textContent = "";
  container.appendChild(buildControls(table, dateQuery, handlers));

  const element = document.createElement("table");
  element.className = "visit-table";

  const head = document.createElement("thead");
  const headRow = document.createElement("tr");
  const dateHead = document.createElement("th");
  dateHead.textContent = "Visit date";
  headRow.appendChild(dateHead);
  for (const concept of concepts) {
    const th = document.createElement("th");
    th.textContent = concept.name;
    headRow.appendChild(th);
  }
  head.appendChild(headRow);
  element.appendChild(head);

  const body = document.createElement("tbody");
  for (const row of table.rows) {
    const tr = document.createElement("tr");
    tr.dataset.visitDate = row.visit_date;
    const dateCell = document.createElement("td");
    dateCell.className = "visit-date";
    dateCell.textContent = row.visit_date;
    tr.appendChild(dateCell);
    for (const concept of concepts) {
      const td = document.createElement("td");
      const cell = row.cells[concept.uuid];
      if (cell) {
        const span = document.createElement("span");
        span.className = cell.color ? `cell band-${cell.color}` : "cell";
        if (cell.color) span.dataset.color = cell.color;
        span.dataset.value = valueText(cell.value);
        span.textContent = valueText(cell.value);
        td.appendChild(span);
      }
      tr.appendChild(td);
    }
    body.appendChild(tr);
  }
  element.appendChild(body);
  container.appendChild(element);

  if (table.rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "table-empty";
    empty.textContent = "no visits match";
    container.appendChild(empty);
  }
}
