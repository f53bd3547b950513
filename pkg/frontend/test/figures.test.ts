import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'
import { describe, expect, it } from 'vitest'
import { column, readTable } from '../src/csv'
import {
  buildSpec,
  chartOption,
  FIGURE_IDS,
  FigureId,
  interpolate,
} from '../src/figures'

const DATA = path.join(__dirname, '..', 'testdata')
const DIRS: Record<FigureId, string> = {
  '2a': path.join(DATA, 'fig2'),
  '2b': path.join(DATA, 'fig2'),
  '3': path.join(DATA, 'fig3'),
  '4': path.join(DATA, 'fig4'),
  '5': path.join(DATA, 'fig5'),
}

describe('buildSpec', () => {
  it('resolves every preset figure', () => {
    for (const id of FIGURE_IDS) {
      const spec = buildSpec(id, DIRS[id], '/tmp/out.png')
      expect(spec.inputs.length).toBeGreaterThan(0)
    }
  })

  it('rejects a directory holding the wrong mode', () => {
    expect(() => buildSpec('3', path.join(DATA, 'fig2'), 'x.png')).toThrow(/sweep/)
  })

  it('rejects a CSV with a missing column', () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'fig-'))
    fs.copyFileSync(
      path.join(DATA, 'fig3', 'manifest.json'),
      path.join(dir, 'manifest.json'),
    )
    const lines = fs
      .readFileSync(path.join(DATA, 'fig3', 'sweep.csv'), 'utf8')
      .split('\n')
      .map((l) =>
        l.startsWith('#') ? l : l.split(',').filter((_, i) => i !== 2).join(','),
      )
    fs.writeFileSync(path.join(dir, 'sweep.csv'), lines.join('\n'))
    expect(() => buildSpec('3', dir, 'x.png')).toThrow(/missing column 'rho_bb_stat'/)
  })
})

describe('figure 2a ordering', () => {
  it('keeps lower-K curves above higher-K curves', () => {
    // optical thickness only slows pumping down, so at any common time
    // the optically thinner sample must be at least as far along
    const spec = buildSpec('2a', DIRS['2a'], 'x.png')
    const tables = spec.inputs.map((f) => readTable(f))
    const tCommon = Math.min(
      ...tables.map((t) => column(t, 't')[t.rows.length - 1]),
    )
    const at = tables.map((t) =>
      interpolate(column(t, 't'), column(t, 'rho_bb'), tCommon),
    )
    for (let i = 1; i < at.length; i++) {
      expect(at[i]).toBeLessThanOrEqual(at[i - 1] + 1e-12)
    }
    expect(at[0]).toBeGreaterThan(0.99) // thin sample is done by then
  })
})

describe('chartOption', () => {
  it('uses log axes where quantities span decades', () => {
    const o2b = chartOption(buildSpec('2b', DIRS['2b'], 'x.png')) as any
    expect(o2b.xAxis.type).toBe('log')
    expect(o2b.yAxis.type).toBe('log')
    const o3 = chartOption(buildSpec('3', DIRS['3'], 'x.png')) as any
    expect(o3.xAxis.type).toBe('log')
  })

  it('carries K and gamma0 values into legend labels', () => {
    const o2a = chartOption(buildSpec('2a', DIRS['2a'], 'x.png')) as any
    expect(o2a.series.map((s: any) => s.name)).toEqual(
      ['K = 0', 'K = 1', 'K = 10', 'K = 100'],
    )
    const o4 = chartOption(buildSpec('4', DIRS['4'], 'x.png')) as any
    expect(o4.series.map((s: any) => s.name)).toContain('gamma0 = 0.0001')
  })

  it('adds the dashed absorption overlay to figure 5', () => {
    const o5 = chartOption(buildSpec('5', DIRS['5'], 'x.png')) as any
    const names = o5.series.map((s: any) => s.name)
    expect(names).toEqual(['K0 = 1', 'K0 = 10', 'K0 = 100', 'absorption (K0 = 1)'])
    expect(o5.series[3].lineStyle.type).toBe('dashed')
  })

  it('pads linear axes around the data', () => {
    const o3 = chartOption(buildSpec('3', DIRS['3'], 'x.png')) as any
    const bb = column(readTable(path.join(DIRS['3'], 'sweep.csv')), 'rho_bb_stat')
    expect(o3.yAxis.min).toBeLessThan(Math.min(...bb))
    expect(o3.yAxis.max).toBeGreaterThan(Math.max(...bb))
    expect(o3.yAxis.max).toBeLessThan(1.1)
  })
})

describe('interpolate', () => {
  it('is linear between grid points and clamped outside', () => {
    const xs = [0, 1, 2]
    const ys = [0, 10, 0]
    expect(interpolate(xs, ys, 0.5)).toBeCloseTo(5)
    expect(interpolate(xs, ys, 1.5)).toBeCloseTo(5)
    expect(interpolate(xs, ys, -1)).toBe(0)
    expect(interpolate(xs, ys, 9)).toBe(0)
  })
})
