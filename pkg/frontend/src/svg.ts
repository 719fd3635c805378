export interface Series {
  name: string
  points: { x: number; y: number }[]
}

export interface FigureOptions {
  title: string
  xLabel: string
  yLabel: string
  logY: boolean
  width?: number
  height?: number
}

const MARGIN = { top: 40, right: 160, bottom: 50, left: 70 }
const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf', '#bcbd22', '#7f7f7f']

export function linearScale(domain: [number, number], range: [number, number]) {
  const [d0, d1] = domain
  const [r0, r1] = range
  const span = d1 - d0 || 1
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0)
}

export function logScale(domain: [number, number], range: [number, number]) {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error('log scale requires strictly positive domain')
  }
  const lin = linearScale([Math.log10(domain[0]), Math.log10(domain[1])], range)
  return (v: number) => lin(Math.log10(v))
}

/** Round-number tick positions covering [min, max]. */
export function linearTicks(min: number, max: number, count = 6): number[] {
  const span = max - min || 1
  const step = Math.pow(10, Math.floor(Math.log10(span / count)))
  const err = span / count / step
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1
  const s = step * mult
  const ticks: number[] = []
  for (let t = Math.ceil(min / s) * s; t <= max + 1e-12; t += s) {
    ticks.push(Number(t.toPrecision(12)))
  }
  return ticks
}

/** Powers of ten covering [min, max]. */
export function logTicks(min: number, max: number): number[] {
  const ticks: number[] = []
  for (let e = Math.floor(Math.log10(min)); e <= Math.ceil(Math.log10(max)); e++) {
    ticks.push(Number(`1e${e}`))
  }
  return ticks
}

function fmt(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e4)) {
    return v.toExponential(0)
  }
  return Number(v.toPrecision(6)).toString()
}

function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}

/** Render line series into a standalone SVG document. */
export function renderFigure(series: Series[], opts: FigureOptions): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new Error('nothing to plot: no series with data points')
  }
  const width = opts.width ?? 760
  const height = opts.height ?? 480
  const plotW: [number, number] = [MARGIN.left, width - MARGIN.right]
  const plotH: [number, number] = [height - MARGIN.bottom, MARGIN.top]

  const xs = series.flatMap((s) => s.points.map((p) => p.x))
  const ys = series.flatMap((s) => s.points.map((p) => p.y))
  const xDom: [number, number] = [Math.min(...xs), Math.max(...xs)]
  const yDom: [number, number] = [Math.min(...ys), Math.max(...ys)]
  if (opts.logY && yDom[0] <= 0) {
    throw new Error('log-scale figure requires positive values')
  }
  // pad the linear y domain slightly so extreme points stay off the frame
  if (!opts.logY) {
    const pad = (yDom[1] - yDom[0] || 1) * 0.05
    yDom[0] -= pad
    yDom[1] += pad
  }
  const xScale = linearScale(xDom, plotW)
  const yScale = opts.logY ? logScale(yDom, plotH) : linearScale(yDom, plotH)

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" font-family="sans-serif" font-size="12">`,
  )
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`)
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="15">${esc(opts.title)}</text>`,
  )

  const xTicks = linearTicks(xDom[0], xDom[1])
  for (const t of xTicks) {
    const x = xScale(t)
    parts.push(`<line x1="${x}" y1="${plotH[0]}" x2="${x}" y2="${plotH[1]}" stroke="#ddd"/>`)
    parts.push(`<text x="${x}" y="${plotH[0] + 18}" text-anchor="middle">${fmt(t)}</text>`)
  }
  const yTicks = opts.logY ? logTicks(yDom[0], yDom[1]) : linearTicks(yDom[0], yDom[1])
  for (const t of yTicks) {
    const y = yScale(t)
    if (y > plotH[0] || y < plotH[1]) continue
    parts.push(`<line x1="${plotW[0]}" y1="${y}" x2="${plotW[1]}" y2="${y}" stroke="#ddd"/>`)
    parts.push(`<text x="${plotW[0] - 8}" y="${y + 4}" text-anchor="end">${fmt(t)}</text>`)
  }
  parts.push(
    `<rect x="${plotW[0]}" y="${plotH[1]}" width="${plotW[1] - plotW[0]}" height="${plotH[0] - plotH[1]}" fill="none" stroke="#333"/>`,
  )
  parts.push(
    `<text x="${(plotW[0] + plotW[1]) / 2}" y="${height - 12}" text-anchor="middle">${esc(opts.xLabel)}</text>`,
  )
  parts.push(
    `<text x="18" y="${(plotH[0] + plotH[1]) / 2}" text-anchor="middle" transform="rotate(-90 18 ${(plotH[0] + plotH[1]) / 2})">${esc(opts.yLabel)}</text>`,
  )

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length]
    const sorted = [...s.points].sort((a, b) => a.x - b.x)
    const d = sorted
      .map((p, j) => `${j === 0 ? 'M' : 'L'}${xScale(p.x).toFixed(2)},${yScale(p.y).toFixed(2)}`)
      .join(' ')
    parts.push(`<path d="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`)
    for (const p of sorted) {
      parts.push(
        `<circle cx="${xScale(p.x).toFixed(2)}" cy="${yScale(p.y).toFixed(2)}" r="3" fill="${color}"/>`,
      )
    }
    const ly = MARGIN.top + 16 * i
    const lx = plotW[1] + 12
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 20}" y2="${ly}" stroke="${color}" stroke-width="1.8"/>`)
    parts.push(`<text x="${lx + 26}" y="${ly + 4}">${esc(s.name)}</text>`)
  })

  parts.push('</svg>')
  return parts.join('\n')
}
