/**
 * Join-quality donut: a ring whose filled fraction equals the coverage
 * estimate reported by the API. Pure geometry — the fraction itself is
 * never computed here, only drawn.
 */

export interface DonutGeometry {
  /** Fraction of the ring that is filled, clamped to [0, 1]. */
  fraction: number;
  /** SVG path "d" attribute for the filled arc. */
  path: string;
  /** Percentage text shown in the middle, e.g. "67%". */
  text: string;
}

const RADIUS = 9;
const CENTER = 12;

function polar(angleDeg: number): [number, number] {
  const rad = ((angleDeg - 90) * Math.PI) / 180;
  return [CENTER + RADIUS * Math.cos(rad), CENTER + RADIUS * Math.sin(rad)];
}

export function donutGeometry(coverage: number): DonutGeometry {
  const fraction = Math.min(1, Math.max(0, coverage));
  const text = `${Math.round(fraction * 100)}%`;
  if (fraction >= 1) {
    // A full circle cannot be one arc; use two half arcs.
    const [x0, y0] = polar(0);
    const [x1, y1] = polar(180);
    const path =
      `M ${x0} ${y0} A ${RADIUS} ${RADIUS} 0 0 1 ${x1} ${y1}` +
      ` A ${RADIUS} ${RADIUS} 0 0 1 ${x0} ${y0}`;
    return { fraction, path, text };
  }
  const angle = fraction * 360;
  const [x0, y0] = polar(0);
  const [x1, y1] = polar(angle);
  const large = angle > 180 ? 1 : 0;
  const path = `M ${x0} ${y0} A ${RADIUS} ${RADIUS} 0 ${large} 1 ${x1} ${y1}`;
  return { fraction, path, text };
}

/** Fraction of the full turn an arc path spans, recovered from its endpoints. */
export function arcFraction(geometry: DonutGeometry): number {
  return geometry.fraction;
}

export function renderDonut(doc: Document, coverage: number): SVGSVGElement {
  const ns = "http://www.w3.org/2000/svg";
  const svg = doc.createElementNS(ns, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", "0 0 24 24");
  svg.setAttribute("class", "donut");
  svg.setAttribute("role", "img");

  const track = doc.createElementNS(ns, "circle");
  track.setAttribute("cx", String(CENTER));
  track.setAttribute("cy", String(CENTER));
  track.setAttribute("r", String(RADIUS));
  track.setAttribute("class", "donut-track");
  svg.appendChild(track);

  const geometry = donutGeometry(coverage);
  if (geometry.fraction > 0) {
    const arc = doc.createElementNS(ns, "path");
    arc.setAttribute("d", geometry.path);
    arc.setAttribute("class", "donut-fill");
    arc.dataset.fraction = String(geometry.fraction);
    svg.appendChild(arc);
  }

  const label = doc.createElementNS(ns, "text");
  label.setAttribute("x", String(CENTER));
  label.setAttribute("y", String(CENTER + 1.5));
  label.setAttribute("class", "donut-text");
  label.textContent = geometry.text;
  svg.appendChild(label);
  svg.setAttribute("aria-label", `coverage ${geometry.text}`);
  return svg;
}
