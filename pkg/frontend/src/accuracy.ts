import type { AccuracyRow, StatsResponse } from './types.ts';

// Shapes the server's accuracy rows for the ticker table. The weighted
// average is rendered exactly as the server reports it; nothing
// verdict-affecting is recomputed client-side.

export interface TickerRow {
  tag: string;
  count: number;
  sampled: string; // "correct/total", the sampled-accuracy column
}

export function tickerRows(stats: StatsResponse): TickerRow[] {
  return stats.rows.map(([tag, count, correct, total]: AccuracyRow) => ({
    tag,
    count,
    sampled: `${correct}/${total}`,
  }));
}

export function weightedAverageDisplay(stats: StatsResponse): string {
  if (stats.weighted_accuracy === null) return '';
  return stats.weighted_accuracy.toFixed(3);
}
