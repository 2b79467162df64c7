import type { TrendResponse } from "./api.js";
import { unitLabel, valueText } from "./format.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const WIDTH = 560;
const HEIGHT = 240;
const MARGIN = { top: 16, right: 16, bottom: 44, left: 52 };

function yDomain(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.1;
  return [Math.max(0, lo - pad), hi + pad];
}

/**
 * One line chart for one test. Points are evenly spaced in fetch order
 * (the server guarantees ascending time) with the server's month label
 * under each point.
 */
export function renderTrendChart(
  container: HTMLElement,
  trend: TrendResponse,
  conceptName: string,
): void {
  container.textContent = "";
  container.className = "trend-chart";
  container.dataset.concept = trend.concept_uuid;
  container.dataset.unit = trend.unit;

  const title = document.createElement("h4");
  title.textContent = conceptName;
  const unitSpan = document.createElement("span");
  unitSpan.className = "unit-label";
  unitSpan.textContent = ` (${unitLabel(trend.unit)})`;
  title.appendChild(unitSpan);
  container.appendChild(title);

  if (trend.points.length === 0) {
    const empty = document.createElement("p");
    empty.className = "trend-empty";
    empty.textContent = "no measurements";
    container.appendChild(empty);
    return;
  }

  const tooltip = document.createElement("div");
  tooltip.className = "tooltip hidden";

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "trend-svg");

  const values = trend.points.map(([, v]) => v);
  const [yLo, yHi] = yDomain(values);
  const innerWidth = WIDTH - MARGIN.left - MARGIN.right;
  const innerHeight = HEIGHT - MARGIN.top - MARGIN.bottom;
  const xAt = (i: number) =>
    trend.points.length === 1
      ? MARGIN.left + innerWidth / 2
      : MARGIN.left + (i * innerWidth) / (trend.points.length - 1);
  const yAt = (v: number) => MARGIN.top + innerHeight * (1 - (v - yLo) / (yHi - yLo));

  for (let tick = 0; tick <= 3; tick++) {
    const v = yLo + ((yHi - yLo) * tick) / 3;
    const y = yAt(v);
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(MARGIN.left));
    line.setAttribute("x2", String(WIDTH - MARGIN.right));
    line.setAttribute("y1", y.toFixed(2));
    line.setAttribute("y2", y.toFixed(2));
    line.setAttribute("class", "trend-grid");
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(MARGIN.left - 6));
    label.setAttribute("y", (y + 4).toFixed(2));
    label.setAttribute("text-anchor", "end");
    label.setAttribute("class", "trend-tick");
    label.textContent = v.toFixed(1);
    svg.appendChild(label);
  }

  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    trend.points.map(([, v], i) => `${xAt(i).toFixed(2)},${yAt(v).toFixed(2)}`).join(" "),
  );
  line.setAttribute("class", "trend-line");
  line.setAttribute("fill", "none");
  svg.appendChild(line);

  trend.points.forEach(([, value], i) => {
    const month = trend.month_labels[i] ?? "";
    const marker = document.createElementNS(SVG_NS, "circle");
    marker.setAttribute("cx", xAt(i).toFixed(2));
    marker.setAttribute("cy", yAt(value).toFixed(2));
    marker.setAttribute("r", "4.5");
    marker.setAttribute("class", "trend-point");
    marker.setAttribute("data-value", valueText(value));
    marker.setAttribute("data-month", month);
    marker.addEventListener("mouseenter", () => {
      tooltip.textContent = `${month}: ${valueText(value)} ${unitLabel(trend.unit)}`;
      tooltip.classList.remove("hidden");
    });
    marker.addEventListener("mouseleave", () => tooltip.classList.add("hidden"));
    svg.appendChild(marker);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", xAt(i).toFixed(2));
    label.setAttribute("y", String(HEIGHT - 8));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "trend-month");
    label.textContent = month;
    svg.appendChild(label);
  });

  container.appendChild(svg);
  container.appendChild(tooltip);
}
