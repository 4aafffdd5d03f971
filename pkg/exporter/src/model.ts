import { ModelConfig } from "./presets.js";
import { stream, xavier } from "./rng.js";
import { tokenIds, tokenize } from "./tokenizer.js";

// A frozen transformer encoder: hashed token embeddings + sinusoidal
// positions, pre-LN self-attention blocks with residuals, a final layer
// norm. Weights come from the model's seed, never from training, and
// sequences are processed one at a time, so no padding position ever
// exists to leak into the pooled mean.

interface LayerWeights {
  wq: Float32Array;
  wk: Float32Array;
  wv: Float32Array;
  wo: Float32Array;
  w1: Float32Array; // dim -> ffDim
  w2: Float32Array; // ffDim -> dim
}

function layerNorm(x: Float64Array, dim: number): void {
  let mean = 0;
  for (let i = 0; i < dim; i++) mean += x[i];
  mean /= dim;
  let variance = 0;
  for (let i = 0; i < dim; i++) {
    const d = x[i] - mean;
    variance += d * d;
  }
  variance /= dim;
  const inv = 1 / Math.sqrt(variance + 1e-5);
  for (let i = 0; i < dim; i++) x[i] = (x[i] - mean) * inv;
}

function gelu(x: number): number {
  return 0.5 * x * (1 + Math.tanh(Math.sqrt(2 / Math.PI) * (x + 0.044715 * x * x * x)));
}

/** y[m] = sum_k x[k] * w[k*cols + m]; w is (rows x cols) row-major. */
function matVec(x: Float64Array, w: Float32Array, rows: number, cols: number, y: Float64Array): void {
  y.fill(0);
  for (let k = 0; k < rows; k++) {
    const xk = x[k];
    if (xk === 0) continue;
    const base = k * cols;
    for (let m = 0; m < cols; m++) y[m] += xk * w[base + m];
  }
}

export class FrozenEncoder {
  readonly cfg: ModelConfig;
  private readonly embeddings: Float32Array; // (vocabBuckets x dim)
  private readonly clsEmbedding: Float32Array;
  private readonly layers: LayerWeights[];

  constructor(cfg: ModelConfig) {
    this.cfg = cfg;
    this.embeddings = xavier(stream(cfg.seed, "embeddings"), cfg.vocabBuckets, cfg.dim);
    this.clsEmbedding = xavier(stream(cfg.seed, "cls"), 1, cfg.dim);
    this.layers = [];
    for (let l = 0; l < cfg.layers; l++) {
      this.layers.push({
        wq: xavier(stream(cfg.seed, `layer${l}/wq`), cfg.dim, cfg.dim),
        wk: xavier(stream(cfg.seed, `layer${l}/wk`), cfg.dim, cfg.dim),
        wv: xavier(stream(cfg.seed, `layer${l}/wv`), cfg.dim, cfg.dim),
        wo: xavier(stream(cfg.seed, `layer${l}/wo`), cfg.dim, cfg.dim),
        w1: xavier(stream(cfg.seed, `layer${l}/ff1`), cfg.dim, cfg.ffDim),
        w2: xavier(stream(cfg.seed, `layer${l}/ff2`), cfg.ffDim, cfg.dim),
      });
    }
  }

  /**
   * Final-layer hidden states for [CLS, T_1 .. T_M].
   * Empty/whitespace-only text has no tokens and no meaningful sequence;
   * callers are expected to filter such rows first.
   */
  hiddenStates(text: string): Float32Array[] {
    const { dim } = this.cfg;
    const ids = tokenIds(tokenize(text, this.cfg.maxTokens), this.cfg.vocabBuckets);
    const seqLen = ids.length + 1;

    // embeddings + sinusoidal positions, CLS at position 0
    const h: Float64Array[] = [];
    for (let p = 0; p < seqLen; p++) {
      const row = new Float64Array(dim);
      const emb = p === 0 ? this.clsEmbedding : this.embeddings.subarray((ids[p - 1]) * dim, (ids[p - 1] + 1) * dim);
      for (let i = 0; i < dim; i++) row[i] = emb[i];
      for (let i = 0; i < dim; i += 2) {
        const freq = Math.pow(10000, -i / dim);
        row[i] += 0.1 * Math.sin(p * freq);
        if (i + 1 < dim) row[i + 1] += 0.1 * Math.cos(p * freq);
      }
      h.push(row);
    }

    for (const layer of this.layers) this.block(h, layer);
    for (const row of h) layerNorm(row, dim);

    return h.map((row) => Float32Array.from(row));
  }

  private block(h: Float64Array[], w: LayerWeights): void {
    const { dim, heads, ffDim } = this.cfg;
    const headDim = dim / heads;
    const seqLen = h.length;

    // attention sublayer (pre-LN)
    const normed = h.map((row) => {
      const c = Float64Array.from(row);
      layerNorm(c, dim);
      return c;
    });
    const q = normed.map(() => new Float64Array(dim));
    const k = normed.map(() => new Float64Array(dim));
    const v = normed.map(() => new Float64Array(dim));
    for (let p = 0; p < seqLen; p++) {
      matVec(normed[p], w.wq, dim, dim, q[p]);
      matVec(normed[p], w.wk, dim, dim, k[p]);
      matVec(normed[p], w.wv, dim, dim, v[p]);
    }
    const mixed = h.map(() => new Float64Array(dim));
    const scores = new Float64Array(seqLen);
    for (let head = 0; head < heads; head++) {
      const off = head * headDim;
      for (let p = 0; p < seqLen; p++) {
        let max = -Infinity;
        for (let s = 0; s < seqLen; s++) {
          let dot = 0;
          for (let i = 0; i < headDim; i++) dot += q[p][off + i] * k[s][off + i];
          scores[s] = dot / Math.sqrt(headDim);
          if (scores[s] > max) max = scores[s];
        }
        let z = 0;
        for (let s = 0; s < seqLen; s++) {
          scores[s] = Math.exp(scores[s] - max);
          z += scores[s];
        }
        for (let s = 0; s < seqLen; s++) {
          const a = scores[s] / z;
          for (let i = 0; i < headDim; i++) mixed[p][off + i] += a * v[s][off + i];
        }
      }
    }
    const attnOut = new Float64Array(dim);
    for (let p = 0; p < seqLen; p++) {
      matVec(mixed[p], w.wo, dim, dim, attnOut);
      for (let i = 0; i < dim; i++) h[p][i] += attnOut[i];
    }

    // feed-forward sublayer (pre-LN)
    const hidden = new Float64Array(ffDim);
    const ffOut = new Float64Array(dim);
    for (let p = 0; p < seqLen; p++) {
      const c = Float64Array.from(h[p]);
      layerNorm(c, dim);
      matVec(c, w.w1, dim, ffDim, hidden);
      for (let i = 0; i < ffDim; i++) hidden[i] = gelu(hidden[i]);
      matVec(hidden, w.w2, ffDim, dim, ffOut);
      for (let i = 0; i < dim; i++) h[p][i] += ffOut[i];
    }
  }
}
