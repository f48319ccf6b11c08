/**
 * Link stroke width from knowledge-graph prevalence:
 * 1 + 5·log10(1+count)/log10(1+maxCount). Unknown counts (null) have no
 * width and render as a dashed neutral stroke instead — unknown is not zero.
 */
export function linkWidth(count: number | null, maxCount: number): number | null {
  if (count === null) return null;
  if (maxCount <= 0 || count < 0) return 1;
  const denominator = Math.log10(1 + maxCount);
  if (denominator === 0) return 1;
  return 1 + (5 * Math.log10(1 + count)) / denominator;
}

export interface StrokeStyle {
  width: number;
  dashed: boolean;
}

export function strokeFor(count: number | null, maxCount: number): StrokeStyle {
  const width = linkWidth(count, maxCount);
  if (width === null) return { width: 1.5, dashed: true };
  return { width, dashed: false };
}
