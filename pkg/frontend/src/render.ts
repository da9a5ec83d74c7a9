import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

/** Server-side render an option to an SVG string. */
export function renderSvg(option: EChartsOption, width = 900, height = 620): string {
  const chart = echarts.init(null, undefined, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
