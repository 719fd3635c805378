import Papa from 'papaparse'

export interface ResultRow {
  experiment: string
  label: string
  snr_db: number
  sweep: number | null
  metric: string
  value: number
  trials: number
  seed: number
}

const REQUIRED = ['experiment', 'label', 'snr_db', 'sweep', 'metric', 'value', 'trials', 'seed']

/** Parse simulator CSV output into typed rows. Throws on malformed input. */
export function parseCsv(text: string): ResultRow[] {
  if (text.trim() === '') {
    throw new Error('CSV is empty')
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  })
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]
    throw new Error(`CSV parse error at row ${first.row}: ${first.message}`)
  }
  const fields = parsed.meta.fields ?? []
  for (const col of REQUIRED) {
    if (!fields.includes(col)) {
      throw new Error(`CSV is missing required column "${col}"`)
    }
  }
  if (parsed.data.length === 0) {
    throw new Error('CSV contains no data rows')
  }
  return parsed.data.map((raw, i) => {
    const snr = Number(raw.snr_db)
    const value = Number(raw.value)
    if (!Number.isFinite(snr) || !Number.isFinite(value)) {
      throw new Error(`non-numeric snr_db or value in data row ${i + 1}`)
    }
    return {
      experiment: raw.experiment,
      label: raw.label,
      snr_db: snr,
      sweep: raw.sweep === '' ? null : Number(raw.sweep),
      metric: raw.metric,
      value,
      trials: Number(raw.trials),
      seed: Number(raw.seed),
    }
  })
}
