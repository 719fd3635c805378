import { ResultRow } from './model.js'
import { FigureOptions, Series, renderFigure } from './svg.js'

export const KINDS = ['nmse', 'crb', 'sumrate'] as const
export type Kind = (typeof KINDS)[number]

const METRIC_NAMES: Record<string, string> = {
  nmse_hr: 'Hr',
  nmse_hs: 'Hs',
  crb_hr: 'Hr',
  crb_hs: 'Hs',
  sum_rate: '',
}

function seriesName(row: ResultRow): string {
  const metric = METRIC_NAMES[row.metric] ?? row.metric
  const base = metric === '' ? row.label : `${row.label} ${metric}`
  return row.sweep === null ? base : `${base} (${row.sweep})`
}

/** Group rows into one line per (label, metric, sweep value). */
export function groupSeries(rows: ResultRow[]): Series[] {
  const byName = new Map<string, Series>()
  for (const row of rows) {
    const name = seriesName(row)
    let s = byName.get(name)
    if (!s) {
      s = { name, points: [] }
      byName.set(name, s)
    }
    s.points.push({ x: row.snr_db, y: row.value })
  }
  return [...byName.values()].sort((a, b) => a.name.localeCompare(b.name))
}

function options(kind: Kind): FigureOptions {
  switch (kind) {
    case 'nmse':
      return { title: 'Channel estimation NMSE', xLabel: 'SNR (dB)', yLabel: 'NMSE', logY: true }
    case 'crb':
      return { title: 'NMSE and lower bound', xLabel: 'SNR (dB)', yLabel: 'NMSE', logY: true }
    case 'sumrate':
      return {
        title: 'Downlink sum rate',
        xLabel: 'SNR (dB)',
        yLabel: 'Sum rate (bits/s/Hz)',
        logY: false,
      }
  }
}

/** Build the complete SVG figure for one experiment kind. */
export function makeFigure(rows: ResultRow[], kind: Kind): string {
  const matching = rows.filter((r) => r.experiment === kind)
  if (matching.length === 0) {
    throw new Error(`no rows with experiment "${kind}" in the CSV`)
  }
  return renderFigure(groupSeries(matching), options(kind))
}
