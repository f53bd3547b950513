/** Server-side rendering: echarts SVG, rasterized to PNG with sharp. */

import * as fs from 'fs'
import * as echarts from 'echarts'
import sharp from 'sharp'
import { chartOption, FigureSpec } from './figures'

export const WIDTH = 960
export const HEIGHT = 640

export function renderSvg(spec: FigureSpec): string {
  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width: WIDTH,
    height: HEIGHT,
  })
  try {
    chart.setOption(chartOption(spec))
    return chart.renderToSVGString()
  } finally {
    chart.dispose()
  }
}

/** Write the figure to spec.output; `.svg` is kept as-is, anything else
 * becomes a PNG.  Output is deterministic: no timestamps or metadata. */
export async function render(spec: FigureSpec): Promise<void> {
  const svg = renderSvg(spec)
  if (spec.output.endsWith('.svg')) {
    fs.writeFileSync(spec.output, svg)
    return
  }
  const png = await sharp(Buffer.from(svg), { density: 144 })
    .png({ compressionLevel: 9 })
    .toBuffer()
  fs.writeFileSync(spec.output, png)
}
