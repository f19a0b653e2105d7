/**
 * Statistics helpers. Sums are compensated (Neumaier) so the means and
 * standard deviations written to the sidecar agree with an independent
 * recomputation to well under the 1e-9 gate regardless of summation order.
 */

export function compensatedSum(values: number[]): number {
  let sum = 0;
  let compensation = 0;
  for (const v of values) {
    const t = sum + v;
    if (Math.abs(sum) >= Math.abs(v)) {
      compensation += sum - t + v;
    } else {
      compensation += v - t + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

export function mean(values: number[]): number {
  if (values.length === 0) {
    throw new Error("mean of an empty sample");
  }
  return compensatedSum(values) / values.length;
}

/** Population standard deviation (divide by n, not n-1). */
export function sd(values: number[]): number {
  const m = mean(values);
  const squared = values.map((v) => (v - m) * (v - m));
  return Math.sqrt(compensatedSum(squared) / values.length);
}
