import json

import numpy as np
import pytest

from kmeans_uniq.cli import main
from kmeans_uniq.kmeans import Dataset


@pytest.fixture
def pts_csv(tmp_path):
    gen = np.random.default_rng(0)
    p = tmp_path / "pts.csv"
    Dataset(gen.standard_normal((60, 2))).to_csv(p)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fit_deterministic_json(pts_csv, capsys):
    args = ("fit", "--data", pts_csv, "--k", "2", "--restarts", "5", "--seed", "7")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    js = json.loads(out1)
    assert js["k"] == 2 and js["n"] == 60 and len(js["centers"]) == 2


def test_wcss_subcommand(pts_csv, capsys):
    code, out, _ = run(capsys, "wcss", "--data", pts_csv, "--k", "2",
                       "--restarts", "5", "--seed", "7")
    assert code == 0
    js = json.loads(out)
    assert js["wcss"] > 0
    assert "centers" not in js


def test_seed_is_mandatory(pts_csv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["fit", "--data", pts_csv, "--k", "2"])
    assert exc.value.code == 2


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_missing_data_exits_3(capsys, tmp_path):
    code, _, err = run(capsys, "fit", "--data", str(tmp_path / "absent.csv"),
                       "--k", "2", "--seed", "1")
    assert code == 3
    assert "error" in err


def test_infeasible_k_exits_4(capsys, tmp_path):
    p = tmp_path / "tiny.csv"
    Dataset(np.ones((5, 1))).to_csv(p)
    code, _, err = run(capsys, "fit", "--data", str(p), "--k", "2", "--seed", "1")
    assert code == 4


def test_bad_parameter_exits_2(capsys, pts_csv):
    code, _, _ = run(capsys, "test-uniqueness", "--data", pts_csv, "--k", "2",
                     "--B", "20", "--alpha", "1.5", "--seed", "1")
    assert code == 2


def test_oracle_catalog_urc3k2(capsys):
    code, out, _ = run(capsys, "oracle", "catalog", "--model", "UrC3k2",
                       "--r", "0.1")
    assert code == 0
    js = json.loads(out)
    assert js["wcss"] == pytest.approx(0.17)
    got = sorted(tuple(np.ravel(e["centers"])) for e in js["entries"])
    assert got == [(-1.0, 0.5), (-0.5, 1.0)]
    assert all(e["multiplicity_class"] == "DNU" for e in js["entries"])


def test_oracle_sample_then_test_uniqueness(tmp_path, capsys):
    data_p = str(tmp_path / "c1k2.csv")
    code, _, _ = run(capsys, "--quiet", "oracle", "sample", "--model", "C1k2",
                     "--n", "10000", "--seed", "7", "--out", data_p)
    assert code == 0
    rep_p = str(tmp_path / "report.json")
    code, _, _ = run(capsys, "--quiet", "test-uniqueness", "--data", data_p,
                     "--k", "2", "--B", "200", "--alpha", "0.05", "--seed", "7",
                     "--out", rep_p)
    assert code == 0
    js = json.loads(open(rep_p).read())
    assert js["reject"] is True
    assert js["n"] == 10000 and js["B"] == 200


def test_oracle_dist(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    Dataset(np.array([[-1.0], [0.5]])).to_csv(a)
    Dataset(np.array([[-0.5], [1.0]])).to_csv(b)
    code, out, _ = run(capsys, "oracle", "dist", "--a", str(a), "--b", str(b))
    assert code == 0
    js = json.loads(out)
    assert js["hausdorff"] == pytest.approx(0.5)
    assert js["gromov_hausdorff"] == pytest.approx(0.0, abs=1e-12)


def test_oracle_wcss(capsys):
    code, out, _ = run(capsys, "oracle", "wcss", "--model", "UrC3k2",
                       "--r", "0.4", "--n-mc", "200000", "--seed", "3")
    assert code == 0
    js = json.loads(out)
    assert abs(js["mc_wcss"] - js["catalog_wcss"]) <= 4 * js["se"]


def test_limit_sim_cli(capsys):
    code, out, _ = run(capsys, "limit-sim", "--model", "UrC3k2", "--r", "0.1",
                       "--mc-n", "50000", "--n-sim", "50000", "--seed", "5")
    assert code == 0
    js = json.loads(out)
    assert js["m"] == 2
    assert js["mean"] < 0


def test_experiment_cli(tmp_path, capsys):
    cfg = {"models": [{"family": "UrC3k2", "r": 0.4, "dim": 1}],
           "sample_sizes": [200], "replicates": 2, "B": 20, "restarts": 4,
           "master_seed": 11, "record_times": False}
    cfg_p = tmp_path / "cfg.json"
    cfg_p.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"
    code, _, _ = run(capsys, "--quiet", "experiment", "--config", str(cfg_p),
                     "--out-dir", str(out_dir))
    assert code == 0
    cells = (out_dir / "cells.csv").read_text().strip().splitlines()
    detail = (out_dir / "detail.csv").read_text().strip().splitlines()
    assert len(cells) == 2 and len(detail) == 3


def test_r_grid_cli(tmp_path, capsys):
    out_p = str(tmp_path / "cells.csv")
    code, _, _ = run(capsys, "--quiet", "r-grid", "--radii", "0.4", "--n", "200",
                     "--replicates", "2", "--B", "10", "--restarts", "4",
                     "--seed", "13", "--out", out_p)
    assert code == 0
    assert len(open(out_p).read().strip().splitlines()) == 2


def test_mc_grid_cli(tmp_path, capsys):
    out_p = str(tmp_path / "cells.csv")
    code, _, _ = run(capsys, "--quiet", "mc-grid", "--radii", "0.3,0.4",
                     "--n", "200", "--replicates", "3", "--restarts", "4",
                     "--seed", "13", "--out", out_p)
    assert code == 0
    assert len(open(out_p).read().strip().splitlines()) == 3


def test_consistency_cli(tmp_path, capsys):
    out_p = str(tmp_path / "centers.csv")
    code, _, _ = run(capsys, "--quiet", "consistency", "--model", "UrC3k2",
                     "--r", "0.4", "--samples", "2", "--n", "300",
                     "--restarts", "4", "--seed", "15", "--out", out_p)
    assert code == 0
    lines = open(out_p).read().strip().splitlines()
    assert lines[0].startswith("model,sample_idx,center_idx,")
    assert len(lines) == 1 + 2 * 2


def test_kmu_data_dir_prefix(tmp_path, capsys, monkeypatch):
    sub = tmp_path / "datadir"
    sub.mkdir()
    Dataset(np.random.default_rng(1).standard_normal((30, 1))).to_csv(sub / "x.csv")
    monkeypatch.setenv("KMU_DATA_DIR", str(sub))
    code, out, _ = run(capsys, "fit", "--data", "x.csv", "--k", "2",
                       "--restarts", "3", "--seed", "2")
    assert code == 0


def test_csv_output_roundtrip_precision(tmp_path, capsys):
    out_p = str(tmp_path / "s.csv")
    code, _, _ = run(capsys, "--quiet", "oracle", "sample", "--model", "C1k2",
                     "--n", "50", "--seed", "9", "--out", out_p)
    assert code == 0
    a = Dataset.from_csv(out_p).values
    from kmeans_uniq.models import ModelSpec, sample
    from kmeans_uniq.rng import RngStream
    b = sample(ModelSpec("C1k2"), 50, RngStream(9)).values
    assert np.array_equal(a, b)
