// GBEM binary writer/reader. Little-endian throughout:
//   magic "GBEM" | version u32 | n u32 | d_in u32 | stage u8 | k u32
// then n records of [label i32 | d_in x float32]. The header is packed,
// 21 bytes, no alignment padding.

const MAGIC = "GBEM";
export const VERSION = 1;
export const STAGE_RAW = 0;
export const STAGE_ENCODED = 1;
const HEADER_BYTES = 21;

export interface GbemData {
  vectors: Float32Array[]; // n rows of d_in
  labels: Int32Array;
  nKnown: number;
  stage: number;
}

export function encodeGbem(data: GbemData): Buffer {
  const n = data.vectors.length;
  if (data.labels.length !== n) throw new Error("labels/vectors length mismatch");
  const dIn = n > 0 ? data.vectors[0].length : 0;
  if (dIn === 0) throw new Error("cannot write zero-dimension vectors");
  const buf = Buffer.alloc(HEADER_BYTES + n * (4 + 4 * dIn));
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(VERSION, 4);
  buf.writeUInt32LE(n, 8);
  buf.writeUInt32LE(dIn, 12);
  buf.writeUInt8(data.stage, 16);
  buf.writeUInt32LE(data.nKnown, 17);
  let off = HEADER_BYTES;
  for (let r = 0; r < n; r++) {
    const vec = data.vectors[r];
    if (vec.length !== dIn) throw new Error(`row ${r}: dimension ${vec.length} != ${dIn}`);
    buf.writeInt32LE(data.labels[r], off);
    off += 4;
    for (let i = 0; i < dIn; i++) {
      buf.writeFloatLE(vec[i], off);
      off += 4;
    }
  }
  return buf;
}

export function decodeGbem(buf: Buffer): GbemData {
  if (buf.length < HEADER_BYTES) throw new Error("truncated header");
  if (buf.toString("ascii", 0, 4) !== MAGIC) throw new Error("bad magic");
  const version = buf.readUInt32LE(4);
  if (version !== VERSION) throw new Error(`unsupported version ${version}`);
  const n = buf.readUInt32LE(8);
  const dIn = buf.readUInt32LE(12);
  const stage = buf.readUInt8(16);
  const nKnown = buf.readUInt32LE(17);
  if (dIn === 0) throw new Error("zero dimension");
  const expected = HEADER_BYTES + n * (4 + 4 * dIn);
  if (buf.length !== expected) {
    throw new Error(`payload is ${buf.length} bytes, expected ${expected}`);
  }
  const vectors: Float32Array[] = [];
  const labels = new Int32Array(n);
  let off = HEADER_BYTES;
  for (let r = 0; r < n; r++) {
    labels[r] = buf.readInt32LE(off);
    off += 4;
    const vec = new Float32Array(dIn);
    for (let i = 0; i < dIn; i++) {
      vec[i] = buf.readFloatLE(off);
      off += 4;
    }
    vectors.push(vec);
  }
  return { vectors, labels, nKnown, stage };
}
