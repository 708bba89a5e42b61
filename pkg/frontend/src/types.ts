/** JSON payload shapes served by the HTTP API. The console renders these
 * verbatim; it never recomputes scores, ranks, or cluster membership. */

export interface SearchHit {
  sid: number;
  text: string;
  journal: string;
  year: number;
  doc: string;
  scores: Record<string, number>;
  ensemble: number;
  variance: number;
  rank: number;
  context: { before: string[]; after: string[] };
  source: { doc_id: string; source_path: string };
}

export interface SentenceRow {
  sid: number;
  doc: string;
  journal: string;
  year: number;
  pos: number;
  kind: string;
  wc: number;
  text: string;
}

export interface ContextWindow {
  before: SentenceRow[];
  center: SentenceRow;
  after: SentenceRow[];
}

export interface OpenInfo {
  doc_id: string;
  title: string;
  journal: string;
  year: number;
  source_path: string;
  servable: boolean;
}

export interface ClusterInfo {
  cluster_id: number;
  size: number;
  member_sids: number[];
  representative_texts: string[];
}

export interface ClusterPoint {
  sid: number;
  x: number;
  y: number;
  cluster_id: number;
}

export interface FlatClusters {
  clusters: ClusterInfo[];
  points: ClusterPoint[];
}

export interface YearEntry {
  total_points: number;
  clusters: ClusterInfo[];
  points: ClusterPoint[];
}

export interface YearlyClusters {
  per_year: Record<string, YearEntry>;
}

export interface EmotionResult {
  task: "emotion";
  histogram: { counts: Record<string, number>; total: number };
  sids: Record<string, number[]>;
}

export interface SearchParams {
  q: string;
  k?: number;
  models?: string;
  keywords?: string;
  year_from?: number;
  year_to?: number;
  journal?: string;
}
