export { render, type FigureKind, type FigureSpec } from "./figures.js";
export { readTable, readGrid, column, type Table, type Grid } from "./csv.js";
