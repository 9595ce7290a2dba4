export { parseGrid, parseBoundary } from "./csv.js";
export type { GridTable, GridRow, BoundaryRow } from "./csv.js";
export {
  CLASS_COLORS,
  OVERLAY_COLOR,
  MARKER_COLOR,
  STABLE_CLASSES,
  cellRect,
  classColor,
  markerPixel,
  renderRegions,
  renderSections,
  renderSplayCircle,
} from "./figures.js";
export { encodePng, decodePng } from "./png.js";
export { Raster } from "./raster.js";
export { main, parseArgs, render } from "./cli.js";
