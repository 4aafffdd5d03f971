"""GBEM embedding files: the on-disk interchange format for datasets.

Binary layout (little-endian):

    magic   4 bytes  b"GBEM"
    version u32      1
    N       u32      sample count
    D_in    u32      vector dimension
    stage   u8       0 = raw, 1 = encoded
    K       u32      number of known classes
    records N x [ label i32 | D_in x float32 ]

A TSV text form (header ``label\\tv1\\t...\\tvD``, one row per sample) is
provided for small human-editable fixtures; values are printed with enough
digits to round-trip float32 exactly.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .data import STAGE_ENCODED, STAGE_RAW, Dataset

MAGIC = b"GBEM"
VERSION = 1
_HEADER = struct.Struct("<4sIIIBI")

_STAGE_CODES = {STAGE_RAW: 0, STAGE_ENCODED: 1}
_STAGE_NAMES = {v: k for k, v in _STAGE_CODES.items()}


class GBEMFormatError(ValueError):
    """Raised on malformed GBEM input; carries the byte offset of the fault."""

    def __init__(self, reason: str, offset: int):
        super().__init__(f"{reason} (at byte offset {offset})")
        self.reason = reason
        self.offset = offset


def _record_dtype(dim: int) -> np.dtype:
    return np.dtype([("label", "<i4"), ("vec", "<f4", (dim,))])


def save_embeddings(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset as a GBEM binary file."""
    header = _HEADER.pack(MAGIC, VERSION, dataset.n_samples, dataset.dim,
                          _STAGE_CODES[dataset.stage], dataset.n_known)
    records = np.empty(dataset.n_samples, dtype=_record_dtype(dataset.dim))
    records["label"] = dataset.labels
    records["vec"] = dataset.features
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(records.tobytes())


def load_embeddings(path: str | Path) -> Dataset:
    """Read a GBEM binary file back into a Dataset.

    A save/load round trip reproduces every vector bit-exactly and preserves
    sample order. Malformed input raises GBEMFormatError with the byte
    offset of the problem.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise GBEMFormatError(f"truncated header: {len(raw)} bytes, need {_HEADER.size}", len(raw))
    magic, version, n, dim, stage_code, k = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise GBEMFormatError(f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise GBEMFormatError(f"unsupported version {version}", 4)
    if stage_code not in _STAGE_NAMES:
        raise GBEMFormatError(f"unknown stage code {stage_code}", 16)
    if dim == 0:
        raise GBEMFormatError("zero vector dimension", 12)
    rec = _record_dtype(dim)
    expected = _HEADER.size + n * rec.itemsize
    if len(raw) < expected:
        raise GBEMFormatError(
            f"truncated payload: {len(raw)} bytes, need {expected} for {n} records", len(raw))
    if len(raw) > expected:
        raise GBEMFormatError(f"trailing bytes after {n} records", expected)
    records = np.frombuffer(raw, dtype=rec, count=n, offset=_HEADER.size)
    return Dataset(records["vec"].copy(), records["label"].astype(np.int32),
                   n_known=k, stage=_STAGE_NAMES[stage_code])


def save_tsv(dataset: Dataset, path: str | Path) -> None:
    """Write the TSV text form (small fixtures only; keeps K/stage out-of-band)."""
    with open(path, "w") as fh:
        fh.write("label\t" + "\t".join(f"v{i + 1}" for i in range(dataset.dim)) + "\n")
        for vec, label in dataset:
            # 9 significant digits round-trip any finite float32
            fh.write(str(label) + "\t" + "\t".join(f"{v:.9g}" for v in vec) + "\n")


def load_tsv(path: str | Path, n_known: int | None = None,
             stage: str = STAGE_RAW) -> Dataset:
    """Read the TSV text form. K defaults to the largest label present."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("label\t"):
        raise GBEMFormatError("missing TSV header line", 0)
    dim = len(lines[0].split("\t")) - 1
    labels, rows = [], []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != dim + 1:
            raise GBEMFormatError(f"row {ln}: expected {dim + 1} columns, got {len(parts)}", 0)
        labels.append(int(parts[0]))
        rows.append([np.float32(p) for p in parts[1:]])
    feats = np.array(rows, dtype=np.float32).reshape(len(rows), dim)
    if n_known is None:
        n_known = max(labels) if labels else 1
    return Dataset(feats, np.array(labels, dtype=np.int32), n_known=n_known, stage=stage)
