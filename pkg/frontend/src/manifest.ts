/** Run manifest: the JSON record every simulator invocation writes. */

import * as fs from 'fs'
import * as path from 'path'
import { z } from 'zod'
import { SchemaError } from './csv'

const manifestSchema = z.object({
  mode: z.enum(['evolve', 'spectrum', 'sweep', 'asymptote', 'oracle']),
  scenario: z.record(z.string(), z.unknown()),
  version: z.string(),
  wall_time_s: z.number(),
  outputs: z.array(z.string()),
})

export type Manifest = z.infer<typeof manifestSchema>

export function readManifest(dir: string): Manifest {
  const file = path.join(dir, 'manifest.json')
  if (!fs.existsSync(file)) {
    throw new SchemaError(`missing input file: ${file}`)
  }
  let doc: unknown
  try {
    doc = JSON.parse(fs.readFileSync(file, 'utf8'))
  } catch (e) {
    throw new SchemaError(`${file}: not valid JSON`)
  }
  const res = manifestSchema.safeParse(doc)
  if (!res.success) {
    const issue = res.error.issues[0]
    throw new SchemaError(`${file}: ${issue.path.join('.')}: ${issue.message}`)
  }
  return res.data
}

/** 'K' for the Doppler-broadened regime, 'K0' for the radiative one. */
export function densityLabel(m: Manifest): string {
  const regime = m.scenario['regime'] as { kind?: string } | undefined
  return regime?.kind === 'inhomogeneous' ? 'K' : 'K0'
}

/** The density ladder a multi-file run iterated over, in output order. */
export function densityList(m: Manifest): number[] {
  const ks = m.scenario['density_params']
  if (Array.isArray(ks) && ks.every((k) => typeof k === 'number')) {
    return ks as number[]
  }
  throw new SchemaError(`manifest scenario lacks a 'density_params' list`)
}
