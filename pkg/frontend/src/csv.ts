/** CSV reading against the simulator's golden schema. */

import * as fs from 'fs'
import Papa from 'papaparse'

/** Raised when an input file does not match the documented layout. */
export class SchemaError extends Error {}

export interface Table {
  file: string
  columns: string[]
  /** leading '# ...' comment lines, hash stripped */
  comments: string[]
  rows: Record<string, number>[]
}

export function readTable(file: string): Table {
  if (!fs.existsSync(file)) {
    throw new SchemaError(`missing input file: ${file}`)
  }
  const text = fs.readFileSync(file, 'utf8')
  const comments = text
    .split('\n')
    .filter((l) => l.startsWith('#'))
    .map((l) => l.replace(/^#\s?/, ''))
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    comments: '#',
    skipEmptyLines: true,
  })
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0]
    throw new SchemaError(`${file}: ${e.message} (row ${e.row})`)
  }
  const columns = parsed.meta.fields ?? []
  const rows = parsed.data.map((raw, i) => {
    const row: Record<string, number> = {}
    for (const c of columns) {
      const v = Number(raw[c])
      // 'nan' cells are legitimate (truncated derived quantities); anything
      // else that fails to parse is a schema violation
      if (Number.isNaN(v) && raw[c] !== 'nan') {
        throw new SchemaError(
          `${file}: non-numeric value ${JSON.stringify(raw[c])} in column '${c}' (row ${i + 1})`,
        )
      }
      row[c] = v
    }
    return row
  })
  return { file, columns, comments, rows }
}

/** Throw a SchemaError naming the first column that is absent. */
export function requireColumns(table: Table, needed: string[]): void {
  for (const c of needed) {
    if (!table.columns.includes(c)) {
      throw new SchemaError(`${table.file}: missing column '${c}'`)
    }
  }
}

export function column(table: Table, name: string): number[] {
  requireColumns(table, [name])
  return table.rows.map((r) => r[name])
}
