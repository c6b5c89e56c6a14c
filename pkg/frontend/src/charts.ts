// Deviation chart construction. Chart values are the service's JSON
// arrays verbatim; nothing is recomputed or rounded client-side.

export interface ChartPoint {
  x: number;
  label: string;
  value: number;
}

export interface DeviationChart {
  title: string;
  points: ChartPoint[];
  yMin: number;
  yMax: number;
  marker: "x";
  aboveZeroLabel: "rushing";
  belowZeroLabel: "dragging";
}

export function buildDeviationChart(
  values: number[],
  kind: "onset" | "cycle",
): DeviationChart {
  return {
    title:
      kind === "onset"
        ? "Average deviation per onset"
        : "Average deviation per cycle",
    points: values.map((value, i) => ({
      x: i,
      label: `${kind} ${i}`,
      value,
    })),
    yMin: -100,
    yMax: 100,
    marker: "x",
    aboveZeroLabel: "rushing",
    belowZeroLabel: "dragging",
  };
}

const WIDTH = 420;
const HEIGHT = 220;
const PAD = 36;

function xPos(i: number, count: number): number {
  if (count === 1) return WIDTH / 2;
  return PAD + (i * (WIDTH - 2 * PAD)) / (count - 1);
}

function yPos(value: number, chart: DeviationChart): number {
  const t = (value - chart.yMin) / (chart.yMax - chart.yMin);
  return HEIGHT - PAD - t * (HEIGHT - 2 * PAD);
}

export function renderChartSvg(chart: DeviationChart): string {
  const zero = yPos(0, chart);
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">`,
    `<title>${chart.title}</title>`,
    `<line x1="${PAD}" y1="${zero}" x2="${WIDTH - PAD}" y2="${zero}" stroke="#888"/>`,
    `<text x="${WIDTH - PAD}" y="${zero - 8}" text-anchor="end" font-size="10">${chart.aboveZeroLabel}</text>`,
    `<text x="${WIDTH - PAD}" y="${zero + 14}" text-anchor="end" font-size="10">${chart.belowZeroLabel}</text>`,
  ];
  const coords = chart.points.map((p) => ({
    cx: xPos(p.x, chart.points.length),
    cy: yPos(p.value, chart),
    point: p,
  }));
  if (coords.length > 1) {
    const path = coords
      .map((c, i) => `${i === 0 ? "M" : "L"}${c.cx.toFixed(1)},${c.cy.toFixed(1)}`)
      .join(" ");
    parts.push(`<path d="${path}" fill="none" stroke="#36c"/>`);
  }
  for (const c of coords) {
    parts.push(
      `<text x="${c.cx.toFixed(1)}" y="${c.cy.toFixed(1)}" text-anchor="middle" ` +
        `dominant-baseline="middle" font-size="12" data-value="${c.point.value}">x</text>`,
    );
    parts.push(
      `<text x="${c.cx.toFixed(1)}" y="${HEIGHT - PAD + 14}" text-anchor="middle" ` +
        `font-size="9">${c.point.label}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
