import { ApiClient, ApiError, isAbortError } from "./api.js";
import { paramsFromUrl, persistParams } from "./state.js";
import type { SearchParams } from "./types.js";
import { renderHits, showOpenNotice } from "./views/hits.js";
import { renderSentiment } from "./views/sentiment.js";
import { renderTrends } from "./views/trends.js";

export interface AppHandles {
  runSearch(params: SearchParams): Promise<void>;
  openSource(docId: string, button: HTMLButtonElement): Promise<void>;
  loadTrends(payload?: Record<string, unknown>): Promise<void>;
  loadSentiment(payload?: Record<string, unknown>): Promise<void>;
  elements: {
    form: HTMLFormElement;
    banner: HTMLElement;
    results: HTMLElement;
    trends: HTMLElement;
    sentiment: HTMLElement;
  };
}

function field(doc: Document, name: string, label: string, type = "text"):
    HTMLElement {
  const wrap = doc.createElement("label");
  wrap.className = `field field-${name}`;
  const caption = doc.createElement("span");
  caption.textContent = label;
  const input = doc.createElement("input");
  input.name = name;
  input.type = type;
  wrap.append(caption, input);
  return wrap;
}

function readForm(form: HTMLFormElement): SearchParams | null {
  const data = new FormData(form);
  const q = String(data.get("q") ?? "").trim();
  if (q === "") {
    return null;
  }
  const params: SearchParams = { q };
  const k = String(data.get("k") ?? "").trim();
  if (/^\d+$/.test(k)) params.k = Number(k);
  const models = String(data.get("models") ?? "").trim();
  if (models) params.models = models;
  const keywords = String(data.get("keywords") ?? "").trim();
  if (keywords) params.keywords = keywords;
  const yearFrom = String(data.get("year_from") ?? "").trim();
  if (/^\d+$/.test(yearFrom)) params.year_from = Number(yearFrom);
  const yearTo = String(data.get("year_to") ?? "").trim();
  if (/^\d+$/.test(yearTo)) params.year_to = Number(yearTo);
  const journal = String(data.get("journal") ?? "").trim();
  if (journal) params.journal = journal;
  return params;
}

function fillForm(form: HTMLFormElement, params: SearchParams): void {
  const set = (name: string, value: string) => {
    const input = form.elements.namedItem(name);
    if (input instanceof HTMLInputElement) {
      input.value = value;
    }
  };
  set("q", params.q);
  set("k", params.k !== undefined ? String(params.k) : "");
  set("models", params.models ?? "");
  set("keywords", params.keywords ?? "");
  set("year_from",
      params.year_from !== undefined ? String(params.year_from) : "");
  set("year_to", params.year_to !== undefined ? String(params.year_to) : "");
  set("journal", params.journal ?? "");
}

/** Build the console inside `root` and wire it to `client`. Returns
 * programmatic handles so flows can be driven without DOM events. */
export function createApp(root: HTMLElement, client: ApiClient): AppHandles {
  const doc = root.ownerDocument;
  root.replaceChildren();

  const banner = doc.createElement("div");
  banner.className = "error-banner";
  banner.setAttribute("role", "alert");
  banner.hidden = true;
  root.appendChild(banner);

  const form = doc.createElement("form");
  form.className = "search-form";
  form.append(
    field(doc, "q", "Query"),
    field(doc, "k", "Top k"),
    field(doc, "models", "Models"),
    field(doc, "keywords", "Keywords"),
    field(doc, "year_from", "From year"),
    field(doc, "year_to", "To year"),
    field(doc, "journal", "Journal"),
  );
  const submit = doc.createElement("button");
  submit.type = "submit";
  submit.textContent = "Search";
  form.appendChild(submit);
  root.appendChild(form);

  const results = doc.createElement("section");
  results.className = "results";
  const trends = doc.createElement("section");
  trends.className = "trends";
  const sentiment = doc.createElement("section");
  sentiment.className = "sentiment";
  root.append(results, trends, sentiment);

  const showError = (error: unknown) => {
    const message = error instanceof ApiError
      ? `${error.message} (status ${error.status})`
      : error instanceof Error ? error.message : String(error);
    banner.textContent = message;
    banner.hidden = false;
  };
  const clearError = () => {
    banner.hidden = true;
    banner.textContent = "";
  };

  const openSource = async (docId: string, button: HTMLButtonElement) => {
    try {
      const info = await client.open(docId);
      if (!info.servable) {
        button.disabled = true;
        showOpenNotice(button,
                       `source file not served (${info.source_path})`);
        return;
      }
      window.open(client.openUrl(docId), "_blank");
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        showOpenNotice(button, "document unknown");
        return;
      }
      showError(error);
    }
  };

  const runSearch = async (params: SearchParams) => {
    persistParams(params);
    fillForm(form, params);
    clearError();
    try {
      const hits = await client.search(params);
      renderHits(results, hits, (docId, button) => {
        void openSource(docId, button);
      });
    } catch (error) {
      if (isAbortError(error)) {
        return; // superseded by a newer search
      }
      showError(error);
    }
  };

  const loadTrends = async (payload: Record<string, unknown> = {}) => {
    clearError();
    try {
      renderTrends(trends, await client.clusterPerYear(payload));
    } catch (error) {
      showError(error);
    }
  };

  const loadSentiment = async (payload: Record<string, unknown> = {}) => {
    clearError();
    try {
      renderSentiment(sentiment, await client.sentimentEmotion(payload));
    } catch (error) {
      showError(error);
    }
  };

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const params = readForm(form);
    if (params !== null) {
      void runSearch(params);
    }
  });

  const initial = paramsFromUrl(doc.defaultView?.location.search ?? "");
  if (initial !== null) {
    void runSearch(initial);
  }

  return {
    runSearch,
    openSource,
    loadTrends,
    loadSentiment,
    elements: { form, banner, results, trends, sentiment },
  };
}
