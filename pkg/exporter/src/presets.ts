import { fnv1a } from "./rng.js";

export interface ModelConfig {
  name: string;
  dim: number;        // hidden size, also the exported vector size
  layers: number;
  heads: number;
  ffDim: number;
  vocabBuckets: number; // hashed vocabulary size
  maxTokens: number;    // truncation length, CLS not counted
  seed: number;
}

// Frozen seeded-weight encoders. No downloads: the "model" is its config,
// weights are derived from the seed on first use. Quality is what you get
// from a random frozen transformer over hashed tokens; the point is a
// deterministic, self-contained feature extractor with real pooling
// semantics, not parity with a pretrained checkpoint.
const PRESETS: Record<string, Omit<ModelConfig, "name" | "seed">> = {
  "frozen-tiny": { dim: 64, layers: 2, heads: 2, ffDim: 128, vocabBuckets: 2048, maxTokens: 32 },
  "frozen-small": { dim: 128, layers: 2, heads: 4, ffDim: 256, vocabBuckets: 4096, maxTokens: 48 },
  "frozen-base": { dim: 256, layers: 4, heads: 8, ffDim: 512, vocabBuckets: 8192, maxTokens: 64 },
};

export const MODEL_NAMES = Object.keys(PRESETS);

export function resolveModel(name: string): ModelConfig {
  const preset = PRESETS[name];
  if (!preset) {
    throw new Error(`unknown model '${name}'; available: ${MODEL_NAMES.join(", ")}`);
  }
  return { name, seed: fnv1a(name), ...preset };
}
