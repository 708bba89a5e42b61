import { describe, expect, it } from "vitest";

import { renderTrends } from "../src/views/trends.js";
import { tenYearTrends } from "./fixtures.js";

function render() {
  const container = document.createElement("div");
  renderTrends(container, tenYearTrends());
  return container;
}

describe("renderTrends", () => {
  it("renders one panel per year in ascending order", () => {
    const container = render();
    const panels = [...container.querySelectorAll("section.year-panel")];
    expect(panels.length).toBe(10);
    expect(panels.map((p) => (p as HTMLElement).dataset.year)).toEqual([
      "2015", "2016", "2017", "2018", "2019",
      "2020", "2021", "2022", "2023", "2024",
    ]);
  });

  it("keeps scatter and summary colors consistent per cluster", () => {
    const container = render();
    const panel = container.querySelector(
      "section.year-panel[data-year='2015']") as HTMLElement;
    for (const item of panel.querySelectorAll("li[data-cluster-id]")) {
      const clusterId = (item as HTMLElement).dataset.clusterId;
      const chipColor = item.querySelector(".color-chip")
        ?.getAttribute("data-color");
      const circles = panel.querySelectorAll(
        `circle[data-cluster-id='${clusterId}']`);
      expect(circles.length).toBeGreaterThan(0);
      for (const circle of circles) {
        expect(circle.getAttribute("fill")).toBe(chipColor);
      }
    }
  });

  it("lists each cluster with id, size, and a representative text", () => {
    const container = render();
    const first = container.querySelector(
      "section.year-panel[data-year='2016'] li[data-cluster-id='1']");
    expect(first?.textContent).toContain("cluster 1 (3)");
    expect(first?.textContent).toContain("Representative sentence 10");
  });

  it("renders a placeholder for a year without clusters", () => {
    const container = render();
    const empty = container.querySelector(
      "section.year-panel[data-year='2019']");
    expect(empty?.querySelector(".placeholder")?.textContent)
      .toContain("No clusters");
    expect(empty?.querySelector("svg")).toBeNull();
  });

  it("matches the trends snapshot", () => {
    const container = render();
    expect(container.innerHTML).toMatchSnapshot();
  });
});
