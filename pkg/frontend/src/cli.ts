#!/usr/bin/env node
/** plot_fig: render one figure from a simulator output directory.
 *
 * Usage: plot_fig <id> --in <dir> --out <file.png>
 *
 * Exit codes: 0 success, 2 bad arguments or input not matching the
 * documented CSV/manifest layout.
 */

import yargs from 'yargs'
import { SchemaError } from './csv'
import { buildSpec, FIGURE_IDS, FigureId } from './figures'
import { render } from './render'

export async function run(argv: string[]): Promise<number> {
  try {
    const args = await yargs(argv)
      .command('$0 <id>', 'render a figure', (y) =>
        y.positional('id', { type: 'string', choices: FIGURE_IDS, demandOption: true }),
      )
      .option('in', { type: 'string', demandOption: true, describe: 'simulator output directory' })
      .option('out', { type: 'string', demandOption: true, describe: 'image file (.png or .svg)' })
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw err ?? new SchemaError(msg)
      })
      .parse()
    const spec = buildSpec(args.id as FigureId, args.in, args.out)
    await render(spec)
  } catch (e) {
    if (e instanceof SchemaError) {
      console.error(`plot_fig: ${e.message}`)
      return 2
    }
    throw e
  }
  return 0
}

if (require.main === module) {
  run(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (e) => {
      console.error(`plot_fig: ${e}`)
      process.exit(1)
    },
  )
}
