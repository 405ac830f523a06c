/**
 * Usage:
 *   node dist/cli.js --kind overlay|sweep|threshold|heatmap \
 *     --input a.csv[,b.csv] --out figure.svg [--title "..."]
 */

import { render, type FigureKind } from "./figures.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg.startsWith("--")) {
      const eq = arg.indexOf("=");
      if (eq >= 0) {
        out.set(arg.slice(2, eq), arg.slice(eq + 1));
      } else {
        out.set(arg.slice(2), argv[++i] ?? "");
      }
    }
  }
  return out;
}

const args = parseArgs(process.argv.slice(2));
const kind = args.get("kind");
const input = args.get("input");
const output = args.get("out");

if (!kind || !input || !output) {
  console.error(
    "usage: cli --kind overlay|sweep|threshold|heatmap --input a.csv[,b.csv] --out figure.svg [--title t]",
  );
  process.exit(2);
}

try {
  const path = render({
    kind: kind as FigureKind,
    inputs: input.split(","),
    output,
    title: args.get("title"),
  });
  console.log(`wrote ${path}`);
} catch (err) {
  console.error(String(err));
  process.exit(2);
}
