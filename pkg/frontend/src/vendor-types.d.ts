// Minimal ambient typings for the runtime dependencies, covering only the
// API surface this package uses. The sandbox npm mirror cannot serve the
// published @types packages; replace with @types/yargs and @types/papaparse
// where a registry is available.

declare module 'yargs' {
  interface Options {
    type?: 'string' | 'number' | 'boolean'
    demandOption?: boolean
    describe?: string
    choices?: string[]
  }
  interface Argv {
    usage(text: string): Argv
    option(name: string, opts: Options): Argv
    strict(): Argv
    exitProcess(flag: boolean): Argv
    parseSync(): Record<string, unknown> & { csv: string; kind: string; out: string }
  }
  function yargs(argv: string[]): Argv
  export default yargs
}

declare module 'yargs/helpers' {
  export function hideBin(argv: string[]): string[]
}

declare module 'papaparse' {
  export interface ParseError {
    row: number | undefined
    message: string
  }
  export interface ParseMeta {
    fields?: string[]
  }
  export interface ParseResult<T> {
    data: T[]
    errors: ParseError[]
    meta: ParseMeta
  }
  export interface ParseConfig {
    header?: boolean
    skipEmptyLines?: boolean
  }
  function parse<T>(input: string, config?: ParseConfig): ParseResult<T>
  const Papa: { parse: typeof parse }
  export default Papa
}
