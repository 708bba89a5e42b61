import type { SearchHit } from "../types.js";
import { scoreBadge } from "../format.js";

export type OpenHandler = (docId: string, button: HTMLButtonElement) => void;

function contextList(doc: Document, lines: string[], side: string):
    HTMLElement {
  const wrap = doc.createElement("div");
  wrap.className = `context context-${side}`;
  for (const line of lines) {
    const p = doc.createElement("p");
    p.className = "context-line";
    p.textContent = line;
    wrap.appendChild(p);
  }
  return wrap;
}

/** Render hits in the exact order received; rank and score come from the
 * API untouched. The matched sentence is the emphasized block, its
 * neighbours are de-emphasized context. */
export function renderHits(container: HTMLElement, hits: SearchHit[],
                           onOpen: OpenHandler): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (hits.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "no-matches";
    empty.textContent = "No matches.";
    container.appendChild(empty);
    return;
  }
  for (const hit of hits) {
    const article = doc.createElement("article");
    article.className = "hit";
    article.dataset.sid = String(hit.sid);
    article.dataset.rank = String(hit.rank);

    const head = doc.createElement("div");
    head.className = "hit-head";
    const rank = doc.createElement("span");
    rank.className = "rank";
    rank.textContent = `#${hit.rank}`;
    const badge = doc.createElement("span");
    badge.className = "score-badge";
    badge.textContent = scoreBadge(hit.ensemble);
    head.append(rank, badge);
    article.appendChild(head);

    article.appendChild(contextList(doc, hit.context.before, "before"));
    const sentence = doc.createElement("p");
    sentence.className = "sentence matched";
    sentence.textContent = hit.text;
    article.appendChild(sentence);
    article.appendChild(contextList(doc, hit.context.after, "after"));

    const source = doc.createElement("div");
    source.className = "source-line";
    const label = doc.createElement("span");
    label.textContent = `${hit.doc} · ${hit.journal} · ${hit.year}`;
    const open = doc.createElement("button");
    open.type = "button";
    open.className = "open";
    open.textContent = "OPEN";
    open.dataset.docId = hit.source.doc_id;
    open.addEventListener("click", () => onOpen(hit.source.doc_id, open));
    const notice = doc.createElement("span");
    notice.className = "open-notice";
    notice.hidden = true;
    source.append(label, open, notice);
    article.appendChild(source);

    container.appendChild(article);
  }
}

export function showOpenNotice(button: HTMLButtonElement, text: string):
    void {
  const notice = button.parentElement?.querySelector(".open-notice");
  if (notice instanceof HTMLElement) {
    notice.textContent = text;
    notice.hidden = false;
  }
}
