/** Minimal SVG composition: scales, axes, polylines, heatmap cells. */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(Math.max(domain[0], 1e-300));
  const hi = Math.log10(Math.max(domain[1], 1e-300));
  const base = linearScale([lo, hi], range);
  const f = ((v: number) => base(Math.log10(Math.max(v, 1e-300)))) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) return Number(v.toPrecision(4)).toString();
  return v.toExponential(1);
}

export const SERIES_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];

export function polyline(
  xs: number[],
  ys: number[],
  sx: Scale,
  sy: Scale,
  color: string,
  width = 1.5,
  dash = "",
): string {
  const pts = xs
    .map((x, i) => `${sx(x).toFixed(2)},${sy(ys[i]).toFixed(2)}`)
    .join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline fill="none" stroke="${color}" stroke-width="${width}"${dashAttr} points="${pts}"/>`;
}

export interface Frame {
  x: number;
  y: number;
  width: number;
  height: number;
}

export function axes(
  frame: Frame,
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
  opts: { xLog?: boolean; yLog?: boolean } = {},
): string {
  const parts: string[] = [];
  const x0 = frame.x;
  const y0 = frame.y + frame.height;
  parts.push(
    `<rect x="${frame.x}" y="${frame.y}" width="${frame.width}" height="${frame.height}" fill="none" stroke="#999"/>`,
  );
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const tx = opts.xLog
      ? Math.pow(10, Math.log10(sx.domain[0]) + (i / ticks) * (Math.log10(sx.domain[1]) - Math.log10(sx.domain[0])))
      : sx.domain[0] + (i / ticks) * (sx.domain[1] - sx.domain[0]);
    const px = sx(tx);
    parts.push(`<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(
      `<text x="${px}" y="${y0 + 16}" font-size="10" text-anchor="middle" fill="#333">${fmt(tx)}</text>`,
    );
    const ty = opts.yLog
      ? Math.pow(10, Math.log10(sy.domain[0]) + (i / ticks) * (Math.log10(sy.domain[1]) - Math.log10(sy.domain[0])))
      : sy.domain[0] + (i / ticks) * (sy.domain[1] - sy.domain[0]);
    const py = sy(ty);
    parts.push(`<line x1="${x0 - 4}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`);
    parts.push(
      `<text x="${x0 - 6}" y="${py + 3}" font-size="10" text-anchor="end" fill="#333">${fmt(ty)}</text>`,
    );
  }
  parts.push(
    `<text x="${frame.x + frame.width / 2}" y="${y0 + 32}" font-size="11" text-anchor="middle" fill="#111">${xLabel}</text>`,
  );
  parts.push(
    `<text x="${x0 - 42}" y="${frame.y + frame.height / 2}" font-size="11" text-anchor="middle" fill="#111" transform="rotate(-90 ${x0 - 42} ${frame.y + frame.height / 2})">${yLabel}</text>`,
  );
  return parts.join("\n");
}

export function legend(frame: Frame, labels: string[], colors: string[], dashes: string[] = []): string {
  const parts: string[] = [];
  labels.forEach((label, i) => {
    const y = frame.y + 14 + i * 14;
    const x = frame.x + frame.width - 130;
    const dash = dashes[i] ? ` stroke-dasharray="${dashes[i]}"` : "";
    parts.push(`<line x1="${x}" y1="${y - 3}" x2="${x + 18}" y2="${y - 3}" stroke="${colors[i]}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${x + 22}" y="${y}" font-size="10" fill="#333">${label}</text>`);
  });
  return parts.join("\n");
}

/** Compact diverging-ish colormap (dark blue -> white handled by caller). */
const VIRIDIS: [number, number, number][] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

export function viridis(t: number): string {
  const u = Math.min(1, Math.max(0, t)) * (VIRIDIS.length - 1);
  const i = Math.min(VIRIDIS.length - 2, Math.floor(u));
  const f = u - i;
  const c0 = VIRIDIS[i];
  const c1 = VIRIDIS[i + 1];
  const mix = c0.map((c, k) => Math.round(c + f * (c1[k] - c)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

export function heatmapCells(
  values: number[][],
  frame: Frame,
  lo: number,
  hi: number,
  maxCellsPerAxis = 160,
): string {
  const n0 = values.length;
  const n1 = values[0].length;
  const stride = Math.max(1, Math.ceil(Math.max(n0, n1) / maxCellsPerAxis));
  const m0 = Math.ceil(n0 / stride);
  const m1 = Math.ceil(n1 / stride);
  const w = frame.width / m0;
  const h = frame.height / m1;
  const span = hi - lo || 1;
  const parts: string[] = [];
  for (let i = 0; i < m0; i++) {
    for (let j = 0; j < m1; j++) {
      const v = values[Math.min(i * stride, n0 - 1)][Math.min(j * stride, n1 - 1)];
      const color = viridis((v - lo) / span);
      // Grid row i is the x coordinate; render x to the right, y up.
      const px = frame.x + i * w;
      const py = frame.y + frame.height - (j + 1) * h;
      parts.push(
        `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${(w + 0.05).toFixed(2)}" height="${(h + 0.05).toFixed(2)}" fill="${color}"/>`,
      );
    }
  }
  return parts.join("\n");
}

export function colorbar(frame: Frame, lo: number, hi: number): string {
  const parts: string[] = [];
  const steps = 24;
  const h = frame.height / steps;
  for (let i = 0; i < steps; i++) {
    const t = 1 - i / (steps - 1);
    parts.push(
      `<rect x="${frame.x}" y="${(frame.y + i * h).toFixed(2)}" width="${frame.width}" height="${(h + 0.1).toFixed(2)}" fill="${viridis(t)}"/>`,
    );
  }
  parts.push(
    `<text x="${frame.x + frame.width + 4}" y="${frame.y + 8}" font-size="9" fill="#333">${fmt(hi)}</text>`,
  );
  parts.push(
    `<text x="${frame.x + frame.width + 4}" y="${frame.y + frame.height}" font-size="9" fill="#333">${fmt(lo)}</text>`,
  );
  return parts.join("\n");
}

export function svgDocument(width: number, height: number, body: string, title?: string): string {
  const titleEl = title
    ? `<text x="${width / 2}" y="18" font-size="13" text-anchor="middle" fill="#111">${title}</text>`
    : "";
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    titleEl,
    body,
    "</svg>",
  ].join("\n");
}
