"""End-to-end exercise of every CLI subcommand through main(argv)."""
import csv
import json

import numpy as np
import pytest

from gbopen import BoundaryModel, DenseEncoder, load_embeddings
from gbopen.cli import main

HP_FLAGS = ["--metric", "euclidean", "--d", "4", "--epochs", "3",
            "--learning-rate", "0.03", "--batch-size", "64",
            "--p-l", "1.0", "--p-t", "1.0", "--n-t", "3", "--seed", "0"]


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """synth -> split -> train once; downstream tests reuse the artifacts."""
    root = tmp_path_factory.mktemp("cli")
    pool = root / "pool.gbem"
    assert main(["synth", "--family", "ring", "--n-known", "3",
                 "--n-per-class", "60", "--n-open-inter", "40",
                 "--n-open-intra", "40", "--stride", "2.0",
                 "--seed", "0", "--out", str(pool)]) == 0
    split_dir = root / "split"
    assert main(["split", "--data", str(pool), "--out-dir", str(split_dir),
                 "--seed", "0"]) == 0
    model_dir = root / "model"
    assert main(["train", "--train", str(split_dir / "train.gbem"),
                 "--out-dir", str(model_dir), *HP_FLAGS]) == 0
    return root


def test_synth_writes_valid_gbem(pipeline):
    ds = load_embeddings(pipeline / "pool.gbem")
    assert ds.n_samples == 3 * 60 + 80
    assert ds.n_known == 3

def test_split_outputs(pipeline):
    split_dir = pipeline / "split"
    train = load_embeddings(split_dir / "train.gbem")
    test = load_embeddings(split_dir / "test.gbem")
    assert train.labels.max() <= 3
    assert np.any(test.labels == 4)
    label_map = json.loads((split_dir / "label_map.json").read_text())
    assert label_map["unknown_label"] == 4


def test_train_artifacts(pipeline):
    model_dir = pipeline / "model"
    enc = DenseEncoder.load(model_dir / "encoder.json")
    assert enc.d == 4
    model = BoundaryModel.load(model_dir / "boundaries.json")
    assert model.n_boundaries >= 3
    log = json.loads((model_dir / "train_log.json").read_text())
    assert len(log["loss_history"]) == 3
    clusters = json.loads((model_dir / "clusters.json").read_text())
    assert clusters["summary"]["m"] >= 3


def test_cluster_subcommand(pipeline, tmp_path, capsys):
    report = tmp_path / "clusters.json"
    assert main(["cluster", "--data", str(pipeline / "split" / "train.gbem"),
                 "--report", str(report), *HP_FLAGS]) == 0
    assert "m=" in capsys.readouterr().out
    assert json.loads(report.read_text())["summary"]["m"] >= 3


def test_cluster_rejects_open_labels(pipeline):
    with pytest.raises(ValueError, match="known-class"):
        main(["cluster", "--data", str(pipeline / "split" / "test.gbem"), *HP_FLAGS])


def test_infer_and_eval(pipeline, tmp_path, capsys):
    pred = tmp_path / "pred.csv"
    assert main(["infer", "--data", str(pipeline / "split" / "test.gbem"),
                 "--boundaries", str(pipeline / "model" / "boundaries.json"),
                 "--encoder", str(pipeline / "model" / "encoder.json"),
                 "--out", str(pred)]) == 0
    rows = pred.read_text().splitlines()
    assert rows[0] == "index,pred"
    test = load_embeddings(pipeline / "split" / "test.gbem")
    assert len(rows) - 1 == test.n_samples

    report = tmp_path / "report.json"
    assert main(["eval", "--data", str(pipeline / "split" / "test.gbem"),
                 "--pred", str(pred), "--out", str(report)]) == 0
    out = capsys.readouterr().out
    assert "Acc=" in out and "F1-U=" in out
    obj = json.loads(report.read_text())
    assert 0.0 <= obj["acc"] <= 1.0
    assert np.sum(np.array(obj["confusion"])) == test.n_samples


def test_infer_closed_never_rejects(pipeline, tmp_path):
    pred = tmp_path / "pred_closed.csv"
    assert main(["infer", "--data", str(pipeline / "split" / "test.gbem"),
                 "--boundaries", str(pipeline / "model" / "boundaries.json"),
                 "--encoder", str(pipeline / "model" / "encoder.json"),
                 "--out", str(pred), "--closed"]) == 0
    preds = [int(r.split(",")[1]) for r in pred.read_text().splitlines()[1:]]
    assert max(preds) <= 3


def test_infer_raw_requires_encoder(pipeline, tmp_path):
    with pytest.raises(SystemExit, match="--encoder"):
        main(["infer", "--data", str(pipeline / "split" / "test.gbem"),
              "--boundaries", str(pipeline / "model" / "boundaries.json"),
              "--out", str(tmp_path / "x.csv")])


def test_run_subcommand(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(["run", "--out-dir", str(out_dir), "--seeds", "0",
                 "--ablations", "full,no_mb",
                 "--family", "ring", "--n-known", "3", "--n-per-class", "60",
                 "--n-open-inter", "40", "--n-open-intra", "40", "--stride", "2.0",
                 *HP_FLAGS])
    assert code == 0
    with open(out_dir / "results.csv") as fh:
        body = list(csv.reader(fh))[1:]
    assert [r[3] for r in body] == ["full", "no_mb"]
    assert "results:" in capsys.readouterr().out


def test_sweep_subcommand(tmp_path):
    out_dir = tmp_path / "sweep"
    code = main(["sweep", "--param", "n_t", "--values", "1,3,5",
                 "--out-dir", str(out_dir), "--seeds", "0",
                 "--family", "ring", "--n-known", "3", "--n-per-class", "60",
                 "--n-open-inter", "40", "--n-open-intra", "40", "--stride", "2.0",
                 *HP_FLAGS])
    assert code == 0
    with open(out_dir / "results.csv") as fh:
        body = list(csv.reader(fh))[1:]
    nb = [int(r[6]) for r in body]
    assert len(nb) == 3 and nb == sorted(nb, reverse=True)


def test_run_with_config_file_and_flag_precedence(tmp_path):
    from gbopen import ExperimentConfig, HyperParams, SynthSpec
    cfg = ExperimentConfig(
        synth=SynthSpec(family="ring", n_known=3, n_per_class=60,
                        n_open_inter=40, n_open_intra=40, stride=2.0),
        hp=HyperParams(metric="euclidean", d=4, epochs=3, learning_rate=0.03,
                       batch_size=64, p_l=1.0, p_t=1.0, n_t=3),
        seeds=[0], ablations=["no_mb"], out_dir=str(tmp_path / "a"))
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg.to_json()))

    # flag overrides the config file's out_dir and seed list
    code = main(["run", "--config", str(cfg_path),
                 "--out-dir", str(tmp_path / "b"), "--seeds", "1"])
    assert code == 0
    assert not (tmp_path / "a").exists()
    with open(tmp_path / "b" / "results.csv") as fh:
        body = list(csv.reader(fh))[1:]
    assert body[0][2] == "1"  # seed column


def test_run_reports_failure_exit_code(tmp_path):
    import warnings as w
    with w.catch_warnings():
        w.simplefilter("ignore")
        code = main(["run", "--out-dir", str(tmp_path / "r"), "--seeds", "0",
                     "--ablations", "full",
                     "--family", "ring", "--n-known", "3", "--n-per-class", "60",
                     "--n-open-inter", "40", "--n-open-intra", "40",
                     "--metric", "euclidean", "--d", "4", "--epochs", "2",
                     "--learning-rate", "0.03", "--batch-size", "64",
                     "--p-l", "1.0", "--p-t", "1.0", "--n-t", "1000000",
                     "--seed", "0"])
    assert code == 2
