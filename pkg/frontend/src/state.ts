import type { SearchParams } from "./types.js";
import { searchQueryString } from "./api.js";

/** Search state lives in the page URL so sessions can be shared by link. */

export function paramsFromUrl(search: string): SearchParams | null {
  const query = new URLSearchParams(search);
  const q = query.get("q");
  if (q === null || q === "") {
    return null;
  }
  const params: SearchParams = { q };
  const k = query.get("k");
  if (k !== null && /^\d+$/.test(k)) params.k = Number(k);
  const models = query.get("models");
  if (models) params.models = models;
  const keywords = query.get("keywords");
  if (keywords) params.keywords = keywords;
  const yearFrom = query.get("year_from");
  if (yearFrom !== null && /^\d+$/.test(yearFrom)) {
    params.year_from = Number(yearFrom);
  }
  const yearTo = query.get("year_to");
  if (yearTo !== null && /^\d+$/.test(yearTo)) {
    params.year_to = Number(yearTo);
  }
  const journal = query.get("journal");
  if (journal) params.journal = journal;
  return params;
}

export function persistParams(params: SearchParams): void {
  const target = `${window.location.pathname}?${searchQueryString(params)}`;
  window.history.replaceState(null, "", target);
}
