import type { ClusterPoint, YearEntry, YearlyClusters } from "../types.js";

/** One fixed palette keyed by cluster id, shared by the scatter points and
 * the summary list so a cluster keeps one color everywhere in a panel. */
export const PALETTE = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
  "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
] as const;

export function clusterColor(clusterId: number): string {
  const index = ((clusterId - 1) % PALETTE.length + PALETTE.length)
    % PALETTE.length;
  return PALETTE[index] as string;
}

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 240;
const HEIGHT = 160;
const PAD = 12;

function scale(values: number[], lo: number, hi: number):
    (v: number) => number {
  const min = Math.min(...values);
  const max = Math.max(...values);
  if (min === max) {
    return () => (lo + hi) / 2;
  }
  return (v: number) => lo + ((v - min) / (max - min)) * (hi - lo);
}

function scatter(doc: Document, points: ClusterPoint[]): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "scatter");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  const sx = scale(points.map((p) => p.x), PAD, WIDTH - PAD);
  const sy = scale(points.map((p) => p.y), HEIGHT - PAD, PAD);
  for (const point of points) {
    const circle = doc.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", sx(point.x).toFixed(1));
    circle.setAttribute("cy", sy(point.y).toFixed(1));
    circle.setAttribute("r", "3");
    circle.setAttribute("fill", clusterColor(point.cluster_id));
    circle.setAttribute("data-sid", String(point.sid));
    circle.setAttribute("data-cluster-id", String(point.cluster_id));
    svg.appendChild(circle);
  }
  return svg;
}

function yearPanel(doc: Document, year: string, entry: YearEntry):
    HTMLElement {
  const panel = doc.createElement("section");
  panel.className = "year-panel";
  panel.dataset.year = year;
  const heading = doc.createElement("h3");
  heading.textContent = year;
  panel.appendChild(heading);
  if (entry.clusters.length === 0) {
    const placeholder = doc.createElement("p");
    placeholder.className = "placeholder";
    placeholder.textContent = "No clusters for this year.";
    panel.appendChild(placeholder);
    return panel;
  }
  panel.appendChild(scatter(doc, entry.points));
  const list = doc.createElement("ol");
  list.className = "cluster-summaries";
  for (const cluster of entry.clusters) {
    const item = doc.createElement("li");
    item.dataset.clusterId = String(cluster.cluster_id);
    const chip = doc.createElement("span");
    chip.className = "color-chip";
    chip.style.backgroundColor = clusterColor(cluster.cluster_id);
    chip.setAttribute("data-color", clusterColor(cluster.cluster_id));
    const text = doc.createElement("span");
    const representative = cluster.representative_texts[0] ?? "";
    text.textContent =
      `cluster ${cluster.cluster_id} (${cluster.size}): ${representative}`;
    item.append(chip, text);
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

/** Render one panel per year, in ascending year order. */
export function renderTrends(container: HTMLElement,
                             data: YearlyClusters): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const years = Object.keys(data.per_year)
    .sort((a, b) => Number(a) - Number(b));
  for (const year of years) {
    const entry = data.per_year[year];
    if (entry !== undefined) {
      container.appendChild(yearPanel(doc, year, entry));
    }
  }
}
