#!/usr/bin/env node
import { readFileSync, writeFileSync } from 'fs'
import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'
import { KINDS, Kind, makeFigure } from './figures.js'
import { parseCsv } from './model.js'

export function run(argv: string[]): number {
  const args = yargs(argv)
    .usage('plot --csv <results.csv> --kind <nmse|crb|sumrate> --out <figure.svg>')
    .option('csv', { type: 'string', demandOption: true, describe: 'simulator CSV file' })
    .option('kind', {
      type: 'string',
      demandOption: true,
      choices: KINDS as unknown as string[],
      describe: 'experiment kind to plot',
    })
    .option('out', { type: 'string', demandOption: true, describe: 'output SVG path' })
    .strict()
    .exitProcess(false)
    .parseSync()

  let text: string
  try {
    text = readFileSync(args.csv, 'utf8')
  } catch (err) {
    console.error(`cannot read ${args.csv}: ${(err as Error).message}`)
    return 2
  }
  try {
    const rows = parseCsv(text)
    const svg = makeFigure(rows, args.kind as Kind)
    writeFileSync(args.out, svg)
  } catch (err) {
    console.error(`plotting failed: ${(err as Error).message}`)
    return 2
  }
  console.log(`wrote ${args.out}`)
  return 0
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split('/').pop()!)
if (invokedDirectly) {
  process.exit(run(hideBin(process.argv)))
}
