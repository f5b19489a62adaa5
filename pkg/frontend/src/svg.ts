const SVG_NS = "http://www.w3.org/2000/svg";

export function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) {
    el.setAttribute(name, String(value));
  }
  return el;
}

export interface Scale {
  (value: number): number;
}

/** Log-scale mapping from a [lo, hi] data domain onto [0, size] pixels. */
export function logScale(lo: number, hi: number, size: number, invert = false): Scale {
  const logLo = Math.log10(lo);
  const span = Math.log10(hi) - logLo || 1;
  return (value: number) => {
    const t = (Math.log10(value) - logLo) / span;
    return invert ? size * (1 - t) : size * t;
  };
}
