export { ADMISSIBLE, EXPERIMENT_SERIES, FITS, FIGURE_KINDS, MOMENTS, SOJOURN_CDF, SPECTRAL, STABLE, headerOf, matchContract, rowSchema } from "./contracts.js";
export type { Cell, Column, Contract, FigureKind, Row } from "./contracts.js";
export { DataError, EmptyDataError, SchemaError, readTable } from "./csv.js";
export type { Table } from "./csv.js";
export { buildFigure } from "./figures.js";
export { figureSpecSchema, render } from "./render.js";
export type { FigureSpec } from "./render.js";
export { main } from "./cli.js";
