// Deterministic weight generation. Everything the encoder does is a pure
// function of (model name, input text), so two runs anywhere produce the
// same file. mulberry32 is tiny and good enough for frozen random weights.

export function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** rng for a named substream, e.g. stream(seed, "layer0/wq"). */
export function stream(baseSeed: number, tag: string): () => number {
  return mulberry32((baseSeed ^ fnv1a(tag)) >>> 0);
}

/** Xavier-uniform (fanIn x fanOut) matrix, row-major Float32Array. */
export function xavier(rand: () => number, fanIn: number, fanOut: number): Float32Array {
  const limit = Math.sqrt(6 / (fanIn + fanOut));
  const w = new Float32Array(fanIn * fanOut);
  for (let i = 0; i < w.length; i++) w[i] = (2 * rand() - 1) * limit;
  return w;
}
