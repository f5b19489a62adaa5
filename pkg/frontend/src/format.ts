/**
 * Number rendering. Every displayed value must be a direct transcription of a
 * service response field, so the default formatter is a passthrough:
 * snapshot tests compare rendered text against String(payload field).
 */

export function fmt(value: number | null): string {
  return value === null ? "-" : String(value);
}

/** Heatmap cells only: ratios shown with two decimal places. */
export function fixed2(value: number): string {
  return value.toFixed(2);
}
