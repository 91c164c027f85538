import { Series } from "./aggregate";

export interface ChartOptions {
  xLabel: string;
  yLabel: string;
  title?: string;
  width?: number;
  height?: number;
  bar?: boolean; // grouped bars instead of lines (eval-count figures)
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"];
const MARGIN = { left: 66, right: 14, top: 26, bottom: 48 };

const fmt = (v: number) => {
  if (v !== 0 && (Math.abs(v) >= 1e5 || Math.abs(v) < 1e-3)) {
    return v.toExponential(1).replace("e+", "e");
  }
  return String(Number(v.toFixed(4)));
};
const px = (v: number) => v.toFixed(2);

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) {
    hi = lo + 1;
    lo -= 1;
  }
  const raw = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function marker(shape: number, cx: number, cy: number, color: string): string {
  const r = 3.4;
  switch (shape % 4) {
    case 1:
      return `<rect x="${px(cx - r)}" y="${px(cy - r)}" width="${px(2 * r)}"`
        + ` height="${px(2 * r)}" fill="${color}"/>`;
    case 2:
      return `<path d="M${px(cx)} ${px(cy - r - 1)}L${px(cx + r + 1)} ${px(cy)}`
        + `L${px(cx)} ${px(cy + r + 1)}L${px(cx - r - 1)} ${px(cy)}Z" fill="${color}"/>`;
    case 3:
      return `<path d="M${px(cx)} ${px(cy - r - 1)}L${px(cx + r + 1)} ${px(cy + r)}`
        + `L${px(cx - r - 1)} ${px(cy + r)}Z" fill="${color}"/>`;
    default:
      return `<circle cx="${px(cx)}" cy="${px(cy)}" r="${px(r)}" fill="${color}"/>`;
  }
}

export function renderChart(series: Series[], opts: ChartOptions): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xsAll = [...new Set(series.flatMap((s) => s.points.map((p) => p.x)))]
    .sort((a, b) => a - b);
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      yLo = Math.min(yLo, p.mean - p.stderr);
      yHi = Math.max(yHi, p.mean + p.stderr);
    }
  }
  if (opts.bar) yLo = Math.min(0, yLo);
  const yPad = (yHi - yLo) * 0.06 || Math.abs(yHi) * 0.1 || 1;
  const yTicks = niceTicks(yLo - (opts.bar ? 0 : yPad), yHi + yPad);
  const yMin = Math.min(yTicks[0], yLo);
  const yMax = Math.max(yTicks[yTicks.length - 1], yHi);
  const sy = (v: number) =>
    MARGIN.top + plotH - ((v - yMin) / (yMax - yMin)) * plotH;

  let xTicks: number[];
  let sx: (v: number) => number;
  if (opts.bar || xsAll.length === 1) {
    // categorical slots keep a lone x value off the plot edge
    const slot = plotW / xsAll.length;
    sx = (v) => MARGIN.left + slot * (xsAll.indexOf(v) + 0.5);
    xTicks = xsAll;
  } else {
    const xLo = xsAll[0];
    const xHi = xsAll[xsAll.length - 1];
    const span = xHi - xLo || 1;
    sx = (v) => MARGIN.left + ((v - xLo) / span) * plotW;
    xTicks = niceTicks(xLo, xHi, 7).filter((t) => t >= xLo && t <= xHi);
  }

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}"`
    + ` height="${height}" viewBox="0 0 ${width} ${height}"`
    + ` font-family="Helvetica, Arial, sans-serif" font-size="11">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  for (const t of yTicks) {
    const y = sy(t);
    parts.push(`<line x1="${MARGIN.left}" y1="${px(y)}"`
      + ` x2="${width - MARGIN.right}" y2="${px(y)}" stroke="#e0e0e0"/>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${px(y + 3.5)}"`
      + ` text-anchor="end">${fmt(t)}</text>`);
  }
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(`<line x1="${px(x)}" y1="${MARGIN.top + plotH}"`
      + ` x2="${px(x)}" y2="${MARGIN.top + plotH + 4}" stroke="#333"/>`);
    parts.push(`<text x="${px(x)}" y="${MARGIN.top + plotH + 16}"`
      + ` text-anchor="middle">${fmt(t)}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}"`
    + ` height="${plotH}" fill="none" stroke="#333"/>`);
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${height - 10}"`
    + ` text-anchor="middle">${opts.xLabel}</text>`);
  parts.push(`<text transform="translate(14 ${MARGIN.top + plotH / 2})`
    + ` rotate(-90)" text-anchor="middle">${opts.yLabel}</text>`);
  if (opts.title) {
    parts.push(`<text x="${MARGIN.left + plotW / 2}" y="16"`
      + ` text-anchor="middle" font-size="13">${opts.title}</text>`);
  }

  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    parts.push(`<g class="series" data-algorithm="${s.algorithm}"`
      + ` data-points="${s.points.length}">`);
    if (opts.bar) {
      const slot = plotW / xsAll.length;
      const bw = (slot * 0.72) / series.length;
      for (const p of s.points) {
        const xc = sx(p.x) - (slot * 0.72) / 2 + bw * si;
        const y = sy(p.mean);
        const y0 = sy(Math.max(0, yMin));
        parts.push(`<rect x="${px(xc)}" y="${px(Math.min(y, y0))}"`
          + ` width="${px(bw - 1)}" height="${px(Math.abs(y0 - y))}"`
          + ` fill="${color}" data-value="${p.mean}"/>`);
        if (p.stderr > 0) {
          const cx = xc + (bw - 1) / 2;
          parts.push(`<line x1="${px(cx)}" y1="${px(sy(p.mean - p.stderr))}"`
            + ` x2="${px(cx)}" y2="${px(sy(p.mean + p.stderr))}" stroke="#333"/>`);
        }
      }
    } else {
      if (s.points.length > 1) {
        const pts = s.points
          .map((p) => `${px(sx(p.x))},${px(sy(p.mean))}`).join(" ");
        parts.push(`<polyline points="${pts}" fill="none" stroke="${color}"`
          + ` stroke-width="1.6"/>`);
      }
      for (const p of s.points) {
        const x = sx(p.x);
        if (p.stderr > 0) {
          const yl = sy(p.mean - p.stderr);
          const yh = sy(p.mean + p.stderr);
          parts.push(`<line x1="${px(x)}" y1="${px(yl)}" x2="${px(x)}"`
            + ` y2="${px(yh)}" stroke="${color}"/>`);
          parts.push(`<line x1="${px(x - 3)}" y1="${px(yl)}" x2="${px(x + 3)}"`
            + ` y2="${px(yl)}" stroke="${color}"/>`);
          parts.push(`<line x1="${px(x - 3)}" y1="${px(yh)}" x2="${px(x + 3)}"`
            + ` y2="${px(yh)}" stroke="${color}"/>`);
        }
        parts.push(marker(si, x, sy(p.mean), color));
      }
    }
    parts.push("</g>");
  });

  const legendX = MARGIN.left + 10;
  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    const y = MARGIN.top + 12 + si * 16;
    if (opts.bar) {
      parts.push(`<rect x="${legendX}" y="${px(y - 7)}" width="14" height="10"`
        + ` fill="${color}"/>`);
    } else {
      parts.push(`<line x1="${legendX}" y1="${px(y - 2)}" x2="${legendX + 20}"`
        + ` y2="${px(y - 2)}" stroke="${color}" stroke-width="1.6"/>`);
      parts.push(marker(si, legendX + 10, y - 2, color));
    }
    parts.push(`<text x="${legendX + 26}" y="${px(y + 1.5)}">`
      + `${s.algorithm}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
