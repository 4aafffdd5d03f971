#!/usr/bin/env node
import { exportTsv } from "./export.js";
import { MODEL_NAMES } from "./presets.js";

const USAGE = `usage: gbem-export --input data.tsv --out pool.gbem [options]

Convert a (label, text) TSV into a GBEM embedding file plus a label-map
JSON sidecar.

options:
  -i, --input PATH       input TSV, columns: label, utterance
  -o, --out PATH         output GBEM path
  -m, --model NAME       encoder preset (default frozen-small)
                         one of: ${MODEL_NAMES.join(", ")}
  -b, --batch-size N     progress reporting granularity (default 32)
      --device NAME      cpu only (flag accepted for interface parity)
  -h, --help
`;

function parseArgs(argv: string[]): Map<string, string> {
  const alias: Record<string, string> = {
    "-i": "--input", "-o": "--out", "-m": "--model", "-b": "--batch-size",
  };
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    let flag = argv[i];
    if (flag === "-h" || flag === "--help") {
      args.set("--help", "");
      continue;
    }
    flag = alias[flag] ?? flag;
    if (!flag.startsWith("--")) throw new Error(`unexpected argument '${argv[i]}'`);
    const value = argv[++i];
    if (value === undefined) throw new Error(`${flag} needs a value`);
    args.set(flag, value);
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(String(e instanceof Error ? e.message : e));
    return 2;
  }
  if (args.has("--help")) {
    process.stdout.write(USAGE);
    return 0;
  }
  const input = args.get("--input");
  const out = args.get("--out");
  if (!input || !out) {
    console.error("--input and --out are required (see --help)");
    return 2;
  }
  const device = args.get("--device") ?? "cpu";
  if (device !== "cpu") {
    console.error(`device '${device}' is not available; this encoder is cpu only`);
    return 2;
  }
  const model = args.get("--model") ?? "frozen-small";
  const batchSize = Number(args.get("--batch-size") ?? "32");
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    console.error("--batch-size must be a positive integer");
    return 2;
  }

  try {
    const summary = exportTsv(input, model, out, batchSize, (done, total) => {
      process.stderr.write(`\rembedding ${done}/${total}`);
      if (done === total) process.stderr.write("\n");
    });
    console.log(
      `wrote ${summary.written} vectors (dim ${summary.dim}, ` +
      `${summary.nLabels} labels) to ${out}` +
      (summary.skippedEmpty ? `; skipped ${summary.skippedEmpty} empty rows` : ""),
    );
    console.log(`label map: ${summary.labelMapPath}`);
    return 0;
  } catch (e) {
    console.error(String(e instanceof Error ? e.message : e));
    return 1;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
