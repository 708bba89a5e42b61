import type { EmotionResult } from "../types.js";

/** Bars show exactly the labels the API returned (dropped labels never
 * arrive), sorted by count descending with the label as tie-break.
 * Clicking a bar reveals the sentence-id list for that emotion. */
export function renderSentiment(container: HTMLElement,
                                data: EmotionResult): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const entries = Object.entries(data.histogram.counts)
    .sort((a, b) => b[1] - a[1] || a[0].localeCompare(b[0]));
  const maxCount = entries.length > 0 ? (entries[0] as [string, number])[1] : 0;

  const total = doc.createElement("p");
  total.className = "sentiment-total";
  total.textContent = `${data.histogram.total} labeled sentences`;
  container.appendChild(total);

  const chart = doc.createElement("div");
  chart.className = "emotion-bars";
  for (const [label, count] of entries) {
    const row = doc.createElement("div");
    row.className = "bar-row";
    row.dataset.label = label;

    const bar = doc.createElement("button");
    bar.type = "button";
    bar.className = "bar";
    bar.dataset.label = label;
    bar.setAttribute("aria-expanded", "false");
    const width = maxCount > 0 ? (count / maxCount) * 100 : 0;
    bar.style.width = `${width.toFixed(1)}%`;
    bar.textContent = `${label} (${count})`;

    const sentences = doc.createElement("div");
    sentences.className = "sentence-list";
    sentences.dataset.label = label;
    sentences.hidden = true;
    for (const sid of data.sids[label] ?? []) {
      const chipEl = doc.createElement("span");
      chipEl.className = "sid-chip";
      chipEl.textContent = `sid ${sid}`;
      sentences.appendChild(chipEl);
    }

    bar.addEventListener("click", () => {
      sentences.hidden = !sentences.hidden;
      bar.setAttribute("aria-expanded", sentences.hidden ? "false" : "true");
    });

    row.append(bar, sentences);
    chart.appendChild(row);
  }
  container.appendChild(chart);
}
