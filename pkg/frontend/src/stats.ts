export function mean(values: number[]): number {
  if (values.length === 0) {
    throw new Error("mean of empty list");
  }
  return values.reduce((a, b) => a + b, 0) / values.length;
}

/** Sample standard deviation (n-1 denominator); zero for a single value. */
export function sampleStd(values: number[]): number {
  if (values.length < 2) {
    return 0;
  }
  const m = mean(values);
  const ss = values.reduce((acc, v) => acc + (v - m) * (v - m), 0);
  return Math.sqrt(ss / (values.length - 1));
}

/** 95% confidence half-width under the normal approximation. */
export function ci95HalfWidth(values: number[]): number {
  if (values.length < 2) {
    return 0;
  }
  return (1.96 * sampleStd(values)) / Math.sqrt(values.length);
}

/** Centered moving average; window 1 (or less) is a no-op. */
export function movingAverage(values: number[], window: number): number[] {
  if (window <= 1) {
    return values.slice();
  }
  const half = Math.floor(window / 2);
  return values.map((_, i) => {
    const lo = Math.max(0, i - half);
    const hi = Math.min(values.length, i + half + 1);
    return mean(values.slice(lo, hi));
  });
}
