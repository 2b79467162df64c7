import type { ConceptInfo, GaugeInfo, SummaryResponse } from "./api.js";
import { datetimeLabel, unitLabel, valueText } from "./format.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const CX = 100;
const CY = 100;
const RADIUS = 80;
const BAND_WIDTH = 16;

/** Angle in radians for a 0..1 fraction along the half-circle dial. */
function dialAngle(fraction: number): number {
  return Math.PI * (1 - Math.min(Math.max(fraction, 0), 1));
}

function pointAt(radius: number, angle: number): [number, number] {
  return [CX + radius * Math.cos(angle), CY - radius * Math.sin(angle)];
}

function arcPath(radius: number, f0: number, f1: number): string {
  const a0 = dialAngle(f0);
  const a1 = dialAngle(f1);
  const [x0, y0] = pointAt(radius, a0);
  const [x1, y1] = pointAt(radius, a1);
  const largeArc = a0 - a1 > Math.PI ? 1 : 0;
  return `M ${x0.toFixed(2)} ${y0.toFixed(2)} A ${radius} ${radius} 0 ${largeArc} 1 ${x1.toFixed(2)} ${y1.toFixed(2)}`;
}

/**
 * Top of the dial axis. Bands always start at 0; when the last band runs to
 * infinity the axis extends a quarter past the highest finite boundary so
 * the open-ended band gets a visible arc.
 */
export function dialAxisMax(gauge: GaugeInfo): number {
  let topFinite = 0;
  let openEnded = false;
  for (const [lower, upper] of gauge.bands) {
    topFinite = Math.max(topFinite, lower);
    if (upper === "inf") {
      openEnded = true;
    } else {
      topFinite = Math.max(topFinite, upper);
    }
  }
  if (topFinite <= 0) {
    return Math.max(10, gauge.value * 1.25);
  }
  return openEnded ? topFinite * 1.25 : topFinite;
}

function renderDial(gauge: GaugeInfo): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", "0 0 200 120");
  svg.setAttribute("class", "gauge-dial");
  const axisMax = dialAxisMax(gauge);

  for (const [lower, upper, color] of gauge.bands) {
    const top = upper === "inf" ? axisMax : Math.min(upper, axisMax);
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", arcPath(RADIUS, lower / axisMax, top / axisMax));
    path.setAttribute("class", `gauge-band band-${color}`);
    path.setAttribute("data-band-color", color);
    path.setAttribute("fill", "none");
    path.setAttribute("stroke-width", String(BAND_WIDTH));
    svg.appendChild(path);
  }

  const needleAngle = dialAngle(gauge.value / axisMax);
  const [nx, ny] = pointAt(RADIUS - BAND_WIDTH, needleAngle);
  const needle = document.createElementNS(SVG_NS, "line");
  needle.setAttribute("x1", String(CX));
  needle.setAttribute("y1", String(CY));
  needle.setAttribute("x2", nx.toFixed(2));
  needle.setAttribute("y2", ny.toFixed(2));
  needle.setAttribute("class", "gauge-needle");
  svg.appendChild(needle);

  const pivot = document.createElementNS(SVG_NS, "circle");
  pivot.setAttribute("cx", String(CX));
  pivot.setAttribute("cy", String(CY));
  pivot.setAttribute("r", "5");
  pivot.setAttribute("class", "gauge-pivot");
  svg.appendChild(pivot);

  return svg;
}

function gaugeTile(gauge: GaugeInfo): HTMLElement {
  const tile = document.createElement("div");
  tile.className = "gauge-tile";
  tile.dataset.concept = gauge.concept_uuid;
  tile.dataset.color = gauge.color;

  const name = document.createElement("h4");
  name.textContent = gauge.name;
  tile.appendChild(name);

  tile.appendChild(renderDial(gauge));

  const chip = document.createElement("div");
  chip.className = `chip band-${gauge.color}`;
  const value = document.createElement("span");
  value.className = "value";
  value.dataset.value = valueText(gauge.value);
  value.textContent = valueText(gauge.value);
  const unit = document.createElement("span");
  unit.className = "unit";
  unit.textContent = unitLabel(gauge.unit);
  chip.append(value, " ", unit);
  tile.appendChild(chip);

  const tooltip = document.createElement("div");
  tooltip.className = "tooltip hidden";
  tooltip.textContent = `${gauge.name}: ${valueText(gauge.value)} ${unitLabel(gauge.unit)} on ${datetimeLabel(gauge.obs_datetime)}`;
  tile.appendChild(tooltip);
  tile.addEventListener("mouseenter", () => tooltip.classList.remove("hidden"));
  tile.addEventListener("mouseleave", () => tooltip.classList.add("hidden"));

  return tile;
}

function placeholderTile(concept: ConceptInfo): HTMLElement {
  const tile = document.createElement("div");
  tile.className = "gauge-tile placeholder";
  tile.dataset.concept = concept.uuid;

  const name = document.createElement("h4");
  name.textContent = concept.name;
  tile.appendChild(name);

  const empty = document.createElement("div");
  empty.className = "no-data";
  empty.textContent = "no data";
  tile.appendChild(empty);

  return tile;
}

function profileTitle(profile: string): string {
  return profile.charAt(0).toUpperCase() + profile.slice(1);
}

/**
 * One tile per configured concept, grouped by profile in config order.
 * Concepts without a gauge in the summary get a "no data" placeholder, so
 * an empty summary still renders a full board.
 */
export function renderGaugeBoard(
  container: HTMLElement,
  summary: SummaryResponse,
  concepts: ConceptInfo[],
): void {
  container.textContent = "";
  const byUuid = new Map(summary.gauges.map((g) => [g.concept_uuid, g]));

  const groups = new Map<string, HTMLElement>();
  for (const concept of concepts) {
    let grid = groups.get(concept.profile);
    if (!grid) {
      const section = document.createElement("section");
      section.className = "profile-group";
      section.dataset.profile = concept.profile;
      const title = document.createElement("h3");
      title.textContent = profileTitle(concept.profile);
      section.appendChild(title);
      grid = document.createElement("div");
      grid.className = "gauge-grid";
      section.appendChild(grid);
      container.appendChild(section);
      groups.set(concept.profile, grid);
    }
    const gauge = byUuid.get(concept.uuid);
    grid.appendChild(gauge ? gaugeTile(gauge) : placeholderTile(concept));
  }
}
