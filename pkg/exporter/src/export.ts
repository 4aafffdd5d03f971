import { readFileSync, writeFileSync } from "node:fs";

import { encodeGbem, STAGE_RAW } from "./gbem.js";
import { FrozenEncoder } from "./model.js";
import { meanPool } from "./pool.js";
import { resolveModel } from "./presets.js";
import { parseTsv } from "./tsv.js";

export interface ExportSummary {
  written: number;
  skippedEmpty: number;
  dim: number;
  nLabels: number;
  model: string;
  labelMapPath: string;
}

export function labelMapPathFor(outputGbemPath: string): string {
  return outputGbemPath.replace(/\.gbem$/, "") + ".labels.json";
}

/**
 * Convert a (label, text) TSV into a GBEM embedding file.
 *
 * Every utterance becomes the mean of its final-layer hidden states
 * [CLS, T_1 .. T_M]. Label strings get dense integer ids 1..L in sorted
 * order, written next to the output as a JSON sidecar. batchSize only
 * controls progress granularity; sequences are encoded independently, so
 * the output is identical for any batch size.
 */
export function exportTsv(
  inputTsvPath: string,
  modelName: string,
  outputGbemPath: string,
  batchSize = 32,
  onBatch?: (done: number, total: number) => void,
): ExportSummary {
  if (batchSize < 1) throw new Error("batchSize must be >= 1");
  const cfg = resolveModel(modelName);
  const encoder = new FrozenEncoder(cfg);
  const { rows, skippedEmpty } = parseTsv(readFileSync(inputTsvPath, "utf-8"));
  if (rows.length === 0) throw new Error(`no usable rows in ${inputTsvPath}`);

  const labelNames = [...new Set(rows.map((r) => r.label))].sort();
  const labelId = new Map(labelNames.map((name, i) => [name, i + 1]));

  const vectors: Float32Array[] = [];
  const labels = new Int32Array(rows.length);
  for (let start = 0; start < rows.length; start += batchSize) {
    const end = Math.min(start + batchSize, rows.length);
    for (let r = start; r < end; r++) {
      vectors.push(meanPool(encoder.hiddenStates(rows[r].text)));
      labels[r] = labelId.get(rows[r].label)!;
    }
    onBatch?.(end, rows.length);
  }

  writeFileSync(outputGbemPath, encodeGbem({
    vectors,
    labels,
    nKnown: labelNames.length,
    stage: STAGE_RAW,
  }));

  const sidecar = {
    model: cfg.name,
    dim: cfg.dim,
    labels: Object.fromEntries(labelNames.map((name, i) => [name, i + 1])),
  };
  const labelMapPath = labelMapPathFor(outputGbemPath);
  writeFileSync(labelMapPath, JSON.stringify(sidecar, null, 2) + "\n");

  return {
    written: rows.length,
    skippedEmpty,
    dim: cfg.dim,
    nLabels: labelNames.length,
    model: cfg.name,
    labelMapPath,
  };
}
