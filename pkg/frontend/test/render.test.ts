import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'
import { describe, expect, it } from 'vitest'
import { buildSpec, FIGURE_IDS, FigureId } from '../src/figures'
import { render, renderSvg } from '../src/render'
import { run } from '../src/cli'

const DATA = path.join(__dirname, '..', 'testdata')
const DIRS: Record<FigureId, string> = {
  '2a': path.join(DATA, 'fig2'),
  '2b': path.join(DATA, 'fig2'),
  '3': path.join(DATA, 'fig3'),
  '4': path.join(DATA, 'fig4'),
  '5': path.join(DATA, 'fig5'),
}

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'render-'))

describe('render', () => {
  it('produces a PNG for every preset figure', async () => {
    for (const id of FIGURE_IDS) {
      const out = path.join(tmp, `fig${id}.png`)
      await render(buildSpec(id, DIRS[id], out))
      const head = fs.readFileSync(out).subarray(0, 8)
      expect(head.toString('hex')).toBe('89504e470d0a1a0a') // PNG signature
      expect(fs.statSync(out).size).toBeGreaterThan(10_000)
    }
  }, 30_000)

  it('is deterministic across reruns', async () => {
    const a = path.join(tmp, 'a.png')
    const b = path.join(tmp, 'b.png')
    await render(buildSpec('2a', DIRS['2a'], a))
    await render(buildSpec('2a', DIRS['2a'], b))
    expect(fs.readFileSync(a).equals(fs.readFileSync(b))).toBe(true)
  })

  it('writes plain SVG when asked to', async () => {
    const out = path.join(tmp, 'fig3.svg')
    await render(buildSpec('3', DIRS['3'], out))
    expect(fs.readFileSync(out, 'utf8')).toContain('<svg')
  })

  it('embeds no timestamps in the SVG', () => {
    const svg = renderSvg(buildSpec('5', DIRS['5'], 'x.svg'))
    expect(svg).not.toMatch(/\b20\d\d-\d\d-\d\d\b/)
  })
})

describe('cli', () => {
  it('exits 0 on success', async () => {
    const rc = await run(['2b', '--in', DIRS['2b'], '--out', path.join(tmp, 'c.png')])
    expect(rc).toBe(0)
  })

  it('exits 2 on an unknown figure id', async () => {
    const rc = await run(['9', '--in', DIRS['2a'], '--out', path.join(tmp, 'd.png')])
    expect(rc).toBe(2)
  })

  it('exits 2 on a missing input directory', async () => {
    const rc = await run(['3', '--in', path.join(tmp, 'void'), '--out', 'x.png'])
    expect(rc).toBe(2)
  })
})
