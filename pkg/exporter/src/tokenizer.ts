import { fnv1a } from "./rng.js";

// Whitespace/punctuation word tokenizer with a hashed vocabulary: every
// token maps to one of vocabBuckets embedding rows, so there is no OOV
// path and no vocab file to ship.

export function tokenize(text: string, maxTokens: number): string[] {
  const words = text.toLowerCase().split(/[^a-z0-9']+/).filter((w) => w.length > 0);
  return words.slice(0, maxTokens);
}

export function tokenIds(tokens: string[], vocabBuckets: number): number[] {
  return tokens.map((t) => fnv1a(t) % vocabBuckets);
}
