"""Command-line surface: one subcommand per pipeline stage plus full runs.

Precedence for run/sweep settings: built-in defaults, then the JSON config
file, then explicit flags.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .boundary import BoundaryModel, build_boundaries, build_single_boundary_baseline, \
    classify_closed, classify_open
from .cluster import cluster_adaptive
from .data import COSINE, EUCLIDEAN, STAGE_ENCODED, STAGE_RAW, Dataset, HyperParams
from .encoder import DenseEncoder, train_ce_baseline, train_hrl
from .gbem import load_embeddings, save_embeddings
from .harness import ABLATIONS, ExperimentConfig, run_experiment, split_open, split_pool
from .metrics import evaluate
from .synth import FAMILIES, SynthSpec, gen_synthetic

_HP_FLAGS = {
    "p_l": dict(type=float, help="split purity threshold"),
    "n_l": dict(type=int, help="split size threshold (default: adaptive)"),
    "p_t": dict(type=float, help="quality filter purity threshold"),
    "n_t": dict(type=int, help="quality filter size threshold"),
    "metric": dict(choices=[COSINE, EUCLIDEAN], help="distance metric"),
    "seed": dict(type=int, help="rng seed"),
    "d": dict(type=int, help="encoder output dimension"),
    "epochs": dict(type=int, help="training epochs"),
    "batch_size": dict(type=int, help="mini-batch size"),
    "learning_rate": dict(type=float, help="gradient step size"),
}

_SYNTH_FLAGS = {
    "family": dict(choices=list(FAMILIES), help="generator family"),
    "n_known": dict(type=int, help="number of known classes"),
    "n_per_class": dict(type=int, help="known points per class"),
    "n_open_inter": dict(type=int, help="open points between classes"),
    "n_open_intra": dict(type=int, help="open points inside a class hull/hole"),
    "dim": dict(type=int, help="output dimension (2-D geometry rotated up)"),
    "noise": dict(type=float, help="blob standard deviation"),
    "blobs_per_class": dict(type=int, help="modes per class (gaussian_mixture)"),
    "inner": dict(type=float, help="innermost ring radius"),
    "width": dict(type=float, help="ring thickness"),
    "stride": dict(type=float, help="spacing between ring inner radii"),
    "hole_radius": dict(type=float, help="intra-open disk radius"),
}


def _add_flags(parser: argparse.ArgumentParser, flags: dict) -> None:
    for name, kw in flags.items():
        parser.add_argument(f"--{name.replace('_', '-')}", default=None, **kw)


def _overrides(args: argparse.Namespace, flags: dict) -> dict:
    return {k: getattr(args, k) for k in flags if getattr(args, k, None) is not None}


def _parse_list(text: str, cast) -> list:
    return [cast(tok) for tok in text.split(",") if tok.strip()]


def _load_for_inference(args) -> tuple[np.ndarray, Dataset]:
    ds = load_embeddings(args.data)
    if ds.stage == STAGE_ENCODED:
        return np.asarray(ds.features, dtype=np.float64), ds
    if not args.encoder:
        raise SystemExit("error: --encoder is required for stage=raw data")
    enc = DenseEncoder.load(args.encoder)
    return enc.forward(ds.features), ds


def _cmd_synth(args) -> int:
    spec = SynthSpec(**_overrides(args, _SYNTH_FLAGS))
    ds = gen_synthetic(spec, args.seed)
    save_embeddings(ds, args.out)
    print(f"wrote {args.out}: N={ds.n_samples} D={ds.dim} K={ds.n_known} "
          f"open={int(np.sum(ds.labels == ds.unknown_label))}")
    return 0


def _cmd_split(args) -> int:
    pool = load_embeddings(args.data)
    has_opens = bool(np.any(np.asarray(pool.labels) == pool.n_known + 1))
    if has_opens:
        sp = split_pool(pool, args.seed, args.train_frac, args.valid_frac)
    else:
        sp = split_open(pool, args.known_ratio, args.seed,
                        test_frac=1.0 - args.train_frac, valid_frac=args.valid_frac)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, ds in (("train", sp.train), ("valid", sp.valid), ("test", sp.test)):
        save_embeddings(ds, out / f"{name}.gbem")
    (out / "label_map.json").write_text(json.dumps(
        {"known": {str(k): v for k, v in sp.label_map.items()},
         "unknown_label": sp.n_known + 1}, indent=2) + "\n")
    print(f"split {args.data} -> {out}: train={sp.train.n_samples} "
          f"valid={sp.valid.n_samples} test={sp.test.n_samples} K={sp.n_known}")
    return 0


def _cmd_cluster(args) -> int:
    ds = load_embeddings(args.data)
    ds.require_known_only()
    hp = HyperParams(**_overrides(args, _HP_FLAGS))
    rng = np.random.default_rng(np.random.SeedSequence([hp.seed, 1, 0]))
    result = cluster_adaptive(ds.features, ds.labels, hp, rng=rng)
    if args.report:
        result.save_report(args.report)
    print(f"clustered {args.data}: m={result.m} filtered={len(result.filtered)} "
          f"per-class={dict(sorted(result.per_class_counts.items()))}")
    return 0


def _cmd_train(args) -> int:
    ds = load_embeddings(args.train)
    ds.require_known_only()
    hp = HyperParams(**_overrides(args, _HP_FLAGS))
    trainer = train_ce_baseline if args.ablation == "no_hrl" else train_hrl
    state = trainer(ds.features, ds.labels, hp, n_known=ds.n_known)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    state.encoder.save(out / "encoder.json", seed=hp.seed, epoch=state.epoch)
    state.clusters.save_report(out / "clusters.json")
    Z = state.encoder.forward(ds.features)
    if args.single_boundary:
        model = build_single_boundary_baseline(Z, ds.labels, hp.metric, n_known=ds.n_known)
    else:
        model = build_boundaries(state.clusters, Z, hp.metric, n_known=ds.n_known)
    model.save(out / "boundaries.json")
    (out / "train_log.json").write_text(json.dumps(
        {"loss_history": state.loss_history, "epoch_stats": state.epoch_stats},
        indent=2) + "\n")
    first = state.loss_history[0] if state.loss_history else float("nan")
    last = state.loss_history[-1] if state.loss_history else float("nan")
    print(f"trained on {args.train}: epochs={state.epoch} loss {first:.4f} -> {last:.4f}; "
          f"boundaries={model.n_boundaries} -> {out}")
    return 0


def _cmd_infer(args) -> int:
    Z, ds = _load_for_inference(args)
    model = BoundaryModel.load(args.boundaries)
    pred = classify_closed(Z, model) if args.closed else classify_open(Z, model)
    lines = ["index,pred"] + [f"{i},{int(p)}" for i, p in enumerate(pred)]
    Path(args.out).write_text("\n".join(lines) + "\n")
    n_unknown = int(np.sum(pred == model.unknown_label)) if not args.closed else 0
    print(f"inferred {len(pred)} samples -> {args.out}"
          + ("" if args.closed else f" (unknown: {n_unknown})"))
    return 0


def _cmd_eval(args) -> int:
    ds = load_embeddings(args.data)
    rows = Path(args.pred).read_text().strip().splitlines()
    if rows and not rows[0].split(",")[-1].strip().lstrip("-").isdigit():
        rows = rows[1:]
    pred = np.array([int(r.split(",")[-1]) for r in rows])
    report = evaluate(pred, ds.labels, ds.n_known, n_boundaries=args.n_boundaries)
    if args.out:
        report.save(args.out)
    print(f"Acc={100 * report.acc:.2f} F1-All={100 * report.f1_all:.2f} "
          f"F1-U={100 * report.f1_unknown:.2f} F1-K={100 * report.f1_known:.2f}")
    return 0


def _build_config(args, sweep: bool) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_json(json.loads(Path(args.config).read_text()))
    else:
        config = ExperimentConfig(ablations=[] if sweep else list(ABLATIONS))
    fields = {}
    for name in ("dataset", "out_dir", "known_ratio", "train_frac", "valid_frac", "name"):
        v = getattr(args, name, None)
        if v is not None:
            fields[name] = v
    if args.seeds is not None:
        fields["seeds"] = _parse_list(args.seeds, int)
    if getattr(args, "ablations", None) is not None:
        fields["ablations"] = _parse_list(args.ablations, str)
    hp_over = _overrides(args, _HP_FLAGS)
    if hp_over:
        fields["hp"] = config.hp.with_overrides(**hp_over)
    synth_over = _overrides(args, _SYNTH_FLAGS)
    if synth_over and fields.get("dataset", config.dataset) is None:
        fields["synth"] = (config.synth or SynthSpec()).with_overrides(**synth_over)
    if sweep:
        cast = int if args.param == "n_t" else float
        fields["sweep_param"] = args.param
        fields["sweep_values"] = _parse_list(args.values, cast)
    return config.with_overrides(**fields)


def _run_config(config: ExperimentConfig) -> int:
    results = run_experiment(config)
    for row in results:
        rep = row["report"]
        tag = f"seed={row['seed']} ablation={row['ablation']} p_t={row['p_t']} n_t={row['n_t']}"
        if rep is None:
            print(f"{tag} FAILED: {row['error']}")
        else:
            print(f"{tag} n_boundaries={rep.n_boundaries} acc={100 * rep.acc:.2f} "
                  f"f1_all={100 * rep.f1_all:.2f} f1_u={100 * rep.f1_unknown:.2f} "
                  f"f1_k={100 * rep.f1_known:.2f}")
    print(f"results: {Path(config.out_dir) / 'results.csv'}")
    return 0 if all(r["status"] == "ok" for r in results) else 2


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gbopen",
        description="Multi-granularity open intent classification: adaptive "
                    "granular-ball clustering, boundary-based open-set inference, "
                    "and the experiment harness around them.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("synth", help="generate a synthetic pool as a GBEM file")
    _add_flags(p, _SYNTH_FLAGS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output GBEM path")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("split", help="split a pool into train/valid/test GBEM files")
    p.add_argument("--data", required=True, help="input GBEM pool")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--known-ratio", type=float, default=0.25,
                   help="fraction of classes designated known (pools without open points)")
    p.add_argument("--train-frac", type=float, default=0.75)
    p.add_argument("--valid-frac", type=float, default=0.1)
    p.set_defaults(fn=_cmd_split)

    p = sub.add_parser("cluster", help="adaptive granular-ball clustering of a GBEM file")
    p.add_argument("--data", required=True)
    p.add_argument("--report", default=None, help="write the ball report JSON here")
    _add_flags(p, _HP_FLAGS)
    p.set_defaults(fn=_cmd_cluster)

    p = sub.add_parser("train", help="train the encoder and write boundaries")
    p.add_argument("--train", required=True, help="training GBEM (known classes only)")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--ablation", choices=["full", "no_hrl"], default="full",
                   help="no_hrl trains by cross-entropy instead")
    p.add_argument("--single-boundary", action="store_true",
                   help="one boundary per class instead of multi-granularity")
    _add_flags(p, _HP_FLAGS)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("infer", help="classify a GBEM file against saved boundaries")
    p.add_argument("--data", required=True)
    p.add_argument("--boundaries", required=True)
    p.add_argument("--encoder", default=None, help="encoder checkpoint (stage=raw data)")
    p.add_argument("--out", required=True, help="output predictions CSV")
    p.add_argument("--closed", action="store_true", help="closed-set rule (no unknown)")
    p.set_defaults(fn=_cmd_infer)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--data", required=True, help="GBEM with gold labels")
    p.add_argument("--pred", required=True, help="predictions CSV from infer")
    p.add_argument("--out", default=None, help="write the report JSON here")
    p.add_argument("--n-boundaries", type=int, default=0)
    p.set_defaults(fn=_cmd_eval)

    for name, is_sweep in (("run", False), ("sweep", True)):
        p = sub.add_parser(name, help="full pipeline over seeds and ablations"
                           if not is_sweep else "p_t or n_t sensitivity sweep")
        p.add_argument("--config", default=None, help="ExperimentConfig JSON")
        p.add_argument("--dataset", default=None, help="GBEM pool (default: synthetic)")
        p.add_argument("--name", default=None, help="dataset column value in the CSV")
        p.add_argument("--out-dir", default=None)
        p.add_argument("--seeds", default=None, help="comma list, e.g. 0,1,2")
        p.add_argument("--known-ratio", type=float, default=None)
        p.add_argument("--train-frac", type=float, default=None)
        p.add_argument("--valid-frac", type=float, default=None)
        if not is_sweep:
            p.add_argument("--ablations", default=None,
                           help=f"comma list from {','.join(ABLATIONS)}")
        else:
            p.add_argument("--param", choices=["p_t", "n_t"], required=True)
            p.add_argument("--values", required=True, help="comma list of sweep values")
        _add_flags(p, _HP_FLAGS)
        _add_flags(p, _SYNTH_FLAGS)
        p.set_defaults(fn=lambda a, s=is_sweep: _run_config(_build_config(a, s)))

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
