/** Figure definitions: which CSVs each figure reads and how it is drawn.
 *
 * Five figures are supported.  2a and 2b come from an `evolve` run
 * (target population and effective pump rate against time), 3 and 4
 * from a stationary `sweep` (Doppler-broadened and radiative regimes),
 * and 5 from a `spectrum` run with its absorption overlay.  All numbers
 * are taken verbatim from the CSVs; nothing is recomputed here.
 */

import * as path from 'path'
import type { EChartsOption, SeriesOption } from 'echarts'
import { column, readTable, requireColumns, SchemaError, Table } from './csv'
import { densityLabel, densityList, Manifest, readManifest } from './manifest'

export const FIGURE_IDS = ['2a', '2b', '3', '4', '5'] as const
export type FigureId = (typeof FIGURE_IDS)[number]

export interface FigureSpec {
  id: FigureId
  /** CSV paths in drawing order */
  inputs: string[]
  manifest: Manifest
  output: string
}

const EVOLVE_COLUMNS = ['t', 'rho_aa', 'rho_bb', 'rho_cc', 'Gamma', 'Gamma_p']

interface FigureKind {
  mode: Manifest['mode']
  /** which manifest outputs the figure consumes */
  select: (outputs: string[]) => string[]
  columns: (m: Manifest) => string[]
}

const KINDS: Record<FigureId, FigureKind> = {
  '2a': {
    mode: 'evolve',
    select: (o) => o.filter((f) => f.startsWith('evolve_')),
    columns: () => EVOLVE_COLUMNS,
  },
  '2b': {
    mode: 'evolve',
    select: (o) => o.filter((f) => f.startsWith('evolve_')),
    columns: () => EVOLVE_COLUMNS,
  },
  '3': {
    mode: 'sweep',
    select: (o) => o.filter((f) => f === 'sweep.csv'),
    columns: () => ['K', 'gamma0', 'rho_bb_stat', 'residual'],
  },
  '4': {
    mode: 'sweep',
    select: (o) => o.filter((f) => f === 'sweep.csv'),
    columns: () => ['K0', 'gamma0', 'rho_bb_stat', 'residual'],
  },
  '5': {
    mode: 'spectrum',
    select: (o) =>
      o.filter((f) => f.startsWith('spectrum_') || f === 'absorption.csv'),
    columns: () => ['delta', 'value'],
  },
}

/** Resolve a figure id against a simulator output directory. */
export function buildSpec(id: FigureId, indir: string, output: string): FigureSpec {
  const kind = KINDS[id]
  if (kind === undefined) {
    throw new SchemaError(`unknown figure id '${id}'; expected one of ${FIGURE_IDS.join(', ')}`)
  }
  const manifest = readManifest(indir)
  if (manifest.mode !== kind.mode) {
    throw new SchemaError(
      `figure ${id} needs a '${kind.mode}' run but ${indir} holds '${manifest.mode}'`,
    )
  }
  const names = kind.select(manifest.outputs)
  if (names.length === 0) {
    throw new SchemaError(`no usable CSVs for figure ${id} in ${indir}`)
  }
  const inputs = names.map((n) => path.join(indir, n))
  for (const f of inputs) {
    requireColumns(readTable(f), kind.columns(manifest))
  }
  return { id, inputs, manifest, output }
}

// ---------------------------------------------------------------------------
// drawing

function pad(values: number[]): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v))
  const lo = Math.min(...finite)
  const hi = Math.max(...finite)
  const margin = 0.05 * (hi - lo || 1)
  // snap outward to a round step so axis labels stay short
  const step = Math.pow(10, Math.floor(Math.log10(margin)))
  const snap = (v: number, dir: number) =>
    Number((dir * Math.ceil((dir * v) / step) * step).toPrecision(12))
  return [snap(lo - margin, -1), snap(hi + margin, 1)]
}

function pairs(xs: number[], ys: number[], positive = false): [number, number][] {
  const out: [number, number][] = []
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue
    if (positive && (xs[i] <= 0 || ys[i] <= 0)) continue
    out.push([xs[i], ys[i]])
  }
  return out
}

function line(name: string, data: [number, number][], dashed = false): SeriesOption {
  return {
    name,
    type: 'line',
    showSymbol: false,
    lineStyle: dashed ? { type: 'dashed', width: 2 } : { width: 2 },
    data,
  }
}

function baseOption(title: string, series: SeriesOption[]): EChartsOption {
  return {
    animation: false,
    backgroundColor: '#ffffff',
    title: { text: title, left: 'center' },
    legend: { bottom: 0 },
    grid: { left: 80, right: 40, top: 60, bottom: 80 },
    series,
  }
}

function axisName(name: string): object {
  return { name, nameLocation: 'middle', nameGap: 35 }
}

function evolveOption(spec: FigureSpec, field: 'rho_bb' | 'Gamma_p'): EChartsOption {
  const label = densityLabel(spec.manifest)
  const ks = densityList(spec.manifest)
  if (ks.length !== spec.inputs.length) {
    throw new SchemaError('manifest density list does not match the CSV count')
  }
  const series = spec.inputs.map((f, i) => {
    const t = readTable(f)
    // both axes are logarithmic (the density ladder spreads the
    // timescales over several decades), so drop the t=0 sample
    return line(`${label} = ${ks[i]}`, pairs(column(t, 't'), column(t, field), true))
  })
  const logY = field === 'Gamma_p'
  const opt = baseOption(
    field === 'rho_bb' ? 'Target-state population' : 'Effective pump rate',
    series,
  )
  opt.xAxis = { type: 'log', ...axisName('t') }
  if (logY) {
    opt.yAxis = { type: 'log', ...axisName(field) }
  } else {
    const all = series.flatMap((s) => (s.data as [number, number][]).map((d) => d[1]))
    const [lo, hi] = pad(all)
    opt.yAxis = { type: 'value', ...axisName(field), min: lo, max: hi }
  }
  return opt
}

function sweepOption(spec: FigureSpec, label: 'K' | 'K0'): EChartsOption {
  const t = readTable(spec.inputs[0])
  const g0s = [...new Set(column(t, 'gamma0'))]
  const series = g0s.map((g0) => {
    const sel = t.rows.filter((r) => r.gamma0 === g0)
    return line(
      `gamma0 = ${g0}`,
      pairs(sel.map((r) => r[label]), sel.map((r) => r.rho_bb_stat)).filter(
        (d) => d[0] > 0,
      ),
    )
  })
  const opt = baseOption('Stationary target-state population', series)
  const [lo, hi] = pad(column(t, 'rho_bb_stat'))
  opt.xAxis = { type: 'log', ...axisName(label) }
  opt.yAxis = { type: 'value', ...axisName('rho_bb'), min: lo, max: hi }
  return opt
}

function spectrumOption(spec: FigureSpec): EChartsOption {
  const label = densityLabel(spec.manifest)
  const ks = densityList(spec.manifest)
  const curves = spec.inputs.filter((f) => path.basename(f).startsWith('spectrum_'))
  const overlay = spec.inputs.find((f) => path.basename(f) === 'absorption.csv')
  if (ks.length !== curves.length) {
    throw new SchemaError('manifest density list does not match the CSV count')
  }
  const series = curves.map((f, i) => {
    const t = readTable(f)
    return line(`${label} = ${ks[i]}`, pairs(column(t, 'delta'), column(t, 'value')))
  })
  const values: number[] = []
  for (const s of series) values.push(...(s.data as [number, number][]).map((d) => d[1]))
  if (overlay !== undefined) {
    const t = readTable(overlay)
    const kOverlay = spec.manifest.scenario['absorption_for']
    series.push(
      line(`absorption (${label} = ${kOverlay})`, pairs(column(t, 'delta'), column(t, 'value')), true),
    )
  }
  const opt = baseOption('Trapped-radiation spectrum', series)
  const [lo, hi] = pad(values)
  opt.xAxis = { type: 'value', ...axisName('delta') }
  opt.yAxis = { type: 'value', ...axisName('intensity'), min: lo, max: hi }
  return opt
}

export function chartOption(spec: FigureSpec): EChartsOption {
  switch (spec.id) {
    case '2a':
      return evolveOption(spec, 'rho_bb')
    case '2b':
      return evolveOption(spec, 'Gamma_p')
    case '3':
      return sweepOption(spec, 'K')
    case '4':
      return sweepOption(spec, 'K0')
    case '5':
      return spectrumOption(spec)
  }
}

/** Piecewise-linear interpolation on an increasing grid (used by tests). */
export function interpolate(xs: number[], ys: number[], x: number): number {
  if (x <= xs[0]) return ys[0]
  for (let i = 1; i < xs.length; i++) {
    if (x <= xs[i]) {
      const w = (x - xs[i - 1]) / (xs[i] - xs[i - 1])
      return ys[i - 1] * (1 - w) + ys[i] * w
    }
  }
  return ys[ys.length - 1]
}
