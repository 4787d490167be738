// Formatting helpers. Every statistic shown in the UI is an API-provided
// value rendered through these functions; nothing is recomputed here.

export function format3(value: number): string {
  return value.toFixed(3);
}

export function formatScore(value: number): string {
  return format3(value);
}

export function formatCount(value: number): string {
  return String(value);
}

export function progressPercent(labeled: number, total: number): string {
  if (total === 0) return "0%";
  return `${Math.round((labeled / total) * 100)}%`;
}
