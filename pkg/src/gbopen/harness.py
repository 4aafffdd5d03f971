"""Experiment driver: split protocols, the ablation grid, and p_t / n_t sweeps.

Two split protocols coexist. Real embedding files carry only known classes,
so a fraction of classes is designated known per seed and the rest become the
open class (split_open). Synthetic pools already contain explicit open points
labeled K+1, so only the known-class samples are partitioned (split_pool).

A sweep reuses one trained encoder per seed and re-applies the quality filter
at each sweep value, which is what makes boundary counts comparable across
the row.
"""
from __future__ import annotations

import csv
import io
import json
import time
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .boundary import build_boundaries, build_single_boundary_baseline, classify_open
from .cluster import ClusterResult, filter_quality
from .data import Dataset, HyperParams
from .encoder import TrainState, train_ce_baseline, train_hrl
from .gbem import load_embeddings
from .metrics import EvalReport, evaluate
from .synth import SynthSpec, gen_synthetic

FULL = "full"
NO_HRL = "no_hrl"
NO_MB = "no_mb"
NO_HRL_NO_MB = "no_hrl_no_mb"
ABLATIONS = (FULL, NO_HRL, NO_MB, NO_HRL_NO_MB)

CSV_HEADER = ["dataset", "ratio", "seed", "ablation", "p_t", "n_t",
              "n_boundaries", "acc", "f1_all", "f1_u", "f1_k"]


@dataclass
class SplitResult:
    train: Dataset
    valid: Dataset
    test: Dataset
    label_map: dict[int, int]  # original label -> dense known id (1..K)

    @property
    def n_known(self) -> int:
        return self.train.n_known


def _partition(n: int, rng: np.random.Generator, test_frac: float,
               valid_frac: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Permute 0..n-1 and cut into train/valid/test index blocks."""
    perm = rng.permutation(n)
    n_test = int(round(test_frac * n)) if n > 1 else 0
    n_test = min(n_test, n - 1)  # keep at least one training sample
    rest = n - n_test
    n_valid = int(round(valid_frac * rest))
    n_valid = min(n_valid, rest - 1)
    return perm[:rest - n_valid], perm[rest - n_valid:rest], perm[rest:]


def split_open(dataset: Dataset, known_class_ratio: float, seed: int,
               test_frac: float = 0.2, valid_frac: float = 0.1) -> SplitResult:
    """Designate a random subset of classes as known and rebuild the splits.

    Known labels are remapped to a dense 1..K (ascending original order);
    every sample of an undesignated class goes to the test set as K+1.
    Known-class samples are partitioned per class into train/valid/test.
    """
    if not 0 < known_class_ratio < 1:
        raise ValueError("known_class_ratio must be in (0, 1)")
    labels = np.asarray(dataset.labels)
    classes = np.unique(labels)
    if classes.size < 2:
        raise ValueError("open split needs at least 2 classes")
    k = max(1, int(round(known_class_ratio * classes.size)))
    if k >= classes.size:
        raise ValueError(f"ratio {known_class_ratio} leaves no unknown classes "
                         f"({k} of {classes.size} designated known)")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 13]))
    known = np.sort(rng.choice(classes, size=k, replace=False))
    label_map = {int(orig): i + 1 for i, orig in enumerate(known)}

    new_labels = np.full(labels.shape, k + 1, dtype=np.int64)
    for orig, dense in label_map.items():
        new_labels[labels == orig] = dense

    tr_idx, va_idx, te_idx = [], [], []
    for orig in known:
        idx = np.flatnonzero(labels == orig)
        tr, va, te = _partition(idx.size, rng, test_frac, valid_frac)
        tr_idx.append(idx[tr])
        va_idx.append(idx[va])
        te_idx.append(idx[te])
    te_idx.append(np.flatnonzero(new_labels == k + 1))

    def _make(parts: list[np.ndarray], n_known: int) -> Dataset:
        idx = np.sort(np.concatenate(parts)) if parts else np.array([], dtype=int)
        return Dataset(features=dataset.features[idx], labels=new_labels[idx],
                       n_known=n_known, stage=dataset.stage)

    return SplitResult(train=_make(tr_idx, k), valid=_make(va_idx, k),
                       test=_make(te_idx, k), label_map=label_map)


def split_pool(dataset: Dataset, seed: int, train_frac: float = 0.75,
               valid_frac: float = 0.1) -> SplitResult:
    """Split a pool whose open points are already labeled K+1.

    Per known class: train_frac of samples go to the train side (then
    valid_frac of those are carved off for validation), the rest to test.
    All open points land in the test set.
    """
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must be in (0, 1)")
    labels = np.asarray(dataset.labels)
    k = dataset.n_known
    if not np.any(labels == k + 1):
        raise ValueError("pool has no open points; use split_open for ratio-based splits")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 17]))
    tr_idx, va_idx, te_idx = [], [], []
    for c in range(1, k + 1):
        idx = np.flatnonzero(labels == c)
        if idx.size == 0:
            raise ValueError(f"known class {c} has no samples")
        tr, va, te = _partition(idx.size, rng, 1.0 - train_frac, valid_frac)
        tr_idx.append(idx[tr])
        va_idx.append(idx[va])
        te_idx.append(idx[te])
    te_idx.append(np.flatnonzero(labels == k + 1))

    def _make(parts: list[np.ndarray]) -> Dataset:
        idx = np.sort(np.concatenate(parts)) if parts else np.array([], dtype=int)
        return dataset.subset(idx)

    return SplitResult(train=_make(tr_idx), valid=_make(va_idx),
                       test=_make(te_idx), label_map={c: c for c in range(1, k + 1)})


@dataclass
class ExperimentConfig:
    """Everything one run_experiment call needs; JSON round-trippable."""

    dataset: str | None = None            # GBEM path; None -> synthetic
    synth: SynthSpec | None = None
    known_ratio: float = 0.25             # split_open protocol only
    hp: HyperParams = field(default_factory=HyperParams)
    ablations: list[str] = field(default_factory=lambda: list(ABLATIONS))
    sweep_param: str | None = None        # "p_t" | "n_t"
    sweep_values: list | None = None
    out_dir: str = "runs/exp"
    seeds: list[int] = field(default_factory=lambda: [0])
    train_frac: float = 0.75
    valid_frac: float = 0.1
    name: str | None = None               # dataset column in the CSV

    def __post_init__(self):
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not 0 < self.known_ratio < 1:
            raise ValueError("known_ratio must be in (0, 1)")
        bad = [a for a in self.ablations if a not in ABLATIONS]
        if bad:
            raise ValueError(f"unknown ablations {bad}; expected subset of {ABLATIONS}")
        if self.sweep_param not in (None, "p_t", "n_t"):
            raise ValueError("sweep_param must be 'p_t' or 'n_t'")
        if self.sweep_param is not None and not self.sweep_values:
            raise ValueError("sweep_param set but sweep_values empty")
        if self.dataset is None and self.synth is None:
            self.synth = SynthSpec()

    @property
    def dataset_name(self) -> str:
        if self.name:
            return self.name
        if self.dataset:
            return Path(self.dataset).stem
        return f"synth:{self.synth.family}"

    def to_json(self) -> dict:
        obj = {k: getattr(self, k) for k in self.__dataclass_fields__}
        obj["hp"] = self.hp.to_json()
        obj["synth"] = self.synth.to_json() if self.synth else None
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        if obj.get("hp") is not None:
            obj["hp"] = HyperParams.from_json(obj["hp"])
        if obj.get("synth") is not None:
            obj["synth"] = SynthSpec.from_json(obj["synth"])
        return cls(**{k: v for k, v in obj.items() if k in cls.__dataclass_fields__})

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **kwargs)


def _load_split(config: ExperimentConfig, seed: int) -> SplitResult:
    if config.dataset is not None:
        pool = load_embeddings(config.dataset)
    else:
        pool = gen_synthetic(config.synth, seed)
    has_opens = bool(np.any(np.asarray(pool.labels) == pool.n_known + 1))
    if has_opens:
        return split_pool(pool, seed, config.train_frac, config.valid_frac)
    return split_open(pool, config.known_ratio, seed,
                      test_frac=1.0 - config.train_frac, valid_frac=config.valid_frac)


def _train(split: SplitResult, hp: HyperParams, kind: str) -> TrainState:
    X, y = split.train.features, split.train.labels
    if kind == "hrl":
        return train_hrl(X, y, hp, n_known=split.n_known)
    return train_ce_baseline(X, y, hp, n_known=split.n_known)


def run_cell(split: SplitResult, state: TrainState, ablation: str,
             p_t: float, n_t: int, hp: HyperParams) -> EvalReport:
    """Boundary construction plus open-set evaluation for one grid cell."""
    if ablation not in ABLATIONS:
        raise ValueError(f"unknown ablation {ablation!r}")
    Z_tr = state.encoder.forward(split.train.features)
    if ablation in (FULL, NO_HRL):
        kept, counts = filter_quality(state.clusters.balls, p_t, n_t,
                                      known_labels=list(range(1, split.n_known + 1)))
        if not kept:
            raise RuntimeError(f"quality filter (p_t={p_t}, n_t={n_t}) removed every ball")
        res = ClusterResult(balls=state.clusters.balls, filtered=kept,
                            per_class_counts=counts)
        model = build_boundaries(res, Z_tr, hp.metric, n_known=split.n_known)
    else:
        model = build_single_boundary_baseline(Z_tr, split.train.labels, hp.metric,
                                               n_known=split.n_known)
    Z_te = state.encoder.forward(split.test.features)
    pred = classify_open(Z_te, model)
    report = evaluate(pred, split.test.labels, split.n_known,
                      n_boundaries=model.n_boundaries)
    if int(report.confusion.sum()) != split.test.n_samples:
        raise RuntimeError("confusion total does not match test size")
    return report


def _cell_rows(config: ExperimentConfig) -> list[dict]:
    rows = []
    for seed in config.seeds:
        for ab in config.ablations:
            rows.append({"seed": seed, "ablation": ab,
                         "p_t": config.hp.p_t, "n_t": config.hp.n_t})
        if config.sweep_param:
            for v in config.sweep_values:
                cell = {"seed": seed, "ablation": FULL,
                        "p_t": config.hp.p_t, "n_t": config.hp.n_t}
                cell[config.sweep_param] = v
                cell["sweep"] = True
                rows.append(cell)
    return rows


def _cell_name(cell: dict) -> str:
    name = f"seed{cell['seed']}_{cell['ablation']}"
    if cell.get("sweep"):
        name += f"_pt{cell['p_t']}_nt{cell['n_t']}"
    return name


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Run the seed x ablation grid plus any sweep; write all artifacts.

    Per cell: split, train (cached per seed and trainer kind), boundary
    construction, open-set classification, evaluation. A failing cell is
    recorded and does not stop the rest. Outputs under config.out_dir:
    cells/<name>.json, results.csv, summary.json. The CSV depends only on
    the config, never on wall time, so reruns reproduce it byte for byte.
    """
    out = Path(config.out_dir)
    (out / "cells").mkdir(parents=True, exist_ok=True)
    cells = _cell_rows(config)
    results: list[dict] = []
    splits: dict[int, SplitResult] = {}
    trainers: dict[tuple[int, str], TrainState | Exception] = {}

    for cell in cells:
        seed, ab = cell["seed"], cell["ablation"]
        kind = "hrl" if ab in (FULL, NO_MB) else "ce"
        t0 = time.perf_counter()
        try:
            if seed not in splits:
                splits[seed] = _load_split(config, seed)
            if (seed, kind) not in trainers:
                try:
                    trainers[(seed, kind)] = _train(splits[seed], config.hp, kind)
                except Exception as e:  # noqa: BLE001 - cell isolation
                    trainers[(seed, kind)] = e
            state = trainers[(seed, kind)]
            if isinstance(state, Exception):
                raise state
            report = run_cell(splits[seed], state, ab, cell["p_t"], cell["n_t"], config.hp)
            status, error = "ok", None
        except Exception as e:  # noqa: BLE001 - cell isolation
            report, status, error = None, "failed", f"{type(e).__name__}: {e}"
        runtime = time.perf_counter() - t0
        row = dict(cell, status=status, error=error, report=report, runtime_s=runtime)
        results.append(row)
        payload = {"dataset": config.dataset_name, "ratio": config.known_ratio,
                   **{k: cell[k] for k in ("seed", "ablation", "p_t", "n_t")},
                   "status": status, "error": error, "runtime_s": round(runtime, 3),
                   "report": report.to_json() if report else None}
        (out / "cells" / f"{_cell_name(cell)}.json").write_text(
            json.dumps(payload, indent=2) + "\n")

    ratio_cell = _fmt(config.known_ratio) if config.dataset is not None else ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in results:
        rep = row["report"]
        metric_cells = rep.csv_cells() if rep else ["", "", "", ""]
        nb = str(rep.n_boundaries) if rep else ""
        writer.writerow([config.dataset_name, ratio_cell, row["seed"], row["ablation"],
                         _fmt(row["p_t"]), row["n_t"], nb, *metric_cells])
    (out / "results.csv").write_text(buf.getvalue())

    failures = [{"cell": _cell_name(r), "error": r["error"]}
                for r in results if r["status"] != "ok"]
    summary = {"config": config.to_json(), "n_cells": len(results),
               "n_failed": len(failures), "failures": failures}
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if failures:
        warnings.warn(f"{len(failures)} of {len(results)} cells failed", stacklevel=2)
    return results
