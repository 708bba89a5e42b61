import type {
  EmotionResult,
  SearchHit,
  YearEntry,
  YearlyClusters,
} from "../src/types.js";

export function makeHit(overrides: Partial<SearchHit> = {}): SearchHit {
  return {
    sid: 5,
    text: "Unfortunately projected reservoir storage declines below planning minimums in most future scenarios.",
    journal: "WRes",
    year: 2022,
    doc: "WRes-2022-Reservoir rules",
    scores: { PSTM_1: 0.74, PSTM_2: 0.772 },
    ensemble: 0.756,
    variance: 0.000256,
    rank: 1,
    context: {
      before: ["A drier spring reduced inflow at most gauges."],
      after: ["Committees approved revised basin operating rules."],
    },
    source: { doc_id: "WRes-2022-Reservoir rules", source_path: "wres.txt" },
    ...overrides,
  };
}

export const THREE_HITS: SearchHit[] = [
  makeHit(),
  makeHit({
    sid: 9,
    rank: 2,
    ensemble: 0.612,
    text: "Snow course records show steady decline in April depth.",
    journal: "HydJ",
    year: 2021,
    doc: "HydJ-2021-Basin review",
    context: { before: [], after: ["Field teams resurveyed the plots."] },
    source: { doc_id: "HydJ-2021-Basin review", source_path: "hydj.txt" },
  }),
  makeHit({
    sid: 2,
    rank: 3,
    ensemble: 0.493,
    text: "Managers describe the storage outlook as uncertain.",
    journal: "HydJ",
    year: 2019,
    doc: "HydJ-2019-Snow outlook",
    context: { before: [], after: [] },
    source: { doc_id: "HydJ-2019-Snow outlook", source_path: "snow.txt" },
  }),
];

function yearEntry(yearIndex: number): YearEntry {
  const base = yearIndex * 10;
  return {
    total_points: 4,
    clusters: [
      {
        cluster_id: 1,
        size: 3,
        member_sids: [base, base + 1, base + 2],
        representative_texts: [
          `Representative sentence ${base} about snowmelt.`,
          `Representative sentence ${base + 1} about runoff.`,
        ],
      },
      {
        cluster_id: 2,
        size: 1,
        member_sids: [base + 3],
        representative_texts: [`Representative sentence ${base + 3}.`],
      },
    ],
    points: [
      { sid: base, x: 0.1, y: 0.2, cluster_id: 1 },
      { sid: base + 1, x: 0.3, y: 0.1, cluster_id: 1 },
      { sid: base + 2, x: 0.2, y: 0.4, cluster_id: 1 },
      { sid: base + 3, x: 0.9, y: 0.8, cluster_id: 2 },
    ],
  };
}

export function tenYearTrends(): YearlyClusters {
  const perYear: Record<string, YearEntry> = {};
  for (let i = 0; i < 10; i += 1) {
    const year = String(2015 + i);
    if (i === 4) {
      perYear[year] = { total_points: 0, clusters: [], points: [] };
    } else {
      perYear[year] = yearEntry(i);
    }
  }
  return { per_year: perYear };
}

export const EMOTION_FIXTURE: EmotionResult = {
  task: "emotion",
  histogram: {
    counts: { disappointment: 150, approval: 150, curiosity: 50 },
    total: 350,
  },
  sids: {
    disappointment: [0, 1, 2],
    approval: [10, 11],
    curiosity: [20],
  },
};
