/**
 * Arithmetic mean of token vectors. The caller passes the full final-layer
 * sequence [CLS, T_1 .. T_M]; the classification token is part of the mean
 * by design, and nothing else (no padding) is ever in the list.
 */
export function meanPool(vectors: Float32Array[]): Float32Array {
  if (vectors.length === 0) throw new Error("cannot pool an empty sequence");
  const dim = vectors[0].length;
  const acc = new Float64Array(dim);
  for (const vec of vectors) {
    if (vec.length !== dim) throw new Error("ragged sequence: token dims differ");
    for (let i = 0; i < dim; i++) acc[i] += vec[i];
  }
  const out = new Float32Array(dim);
  for (let i = 0; i < dim; i++) out[i] = acc[i] / vectors.length;
  return out;
}
