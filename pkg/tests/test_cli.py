import json

import numpy as np
import pytest

from nhplan.cli import main
from nhplan.region_graph import EdgeField, read_efld, write_efld


def test_gen_maps(tmp_path, capsys):
    assert main(["gen-maps", "--category", "walls", "--count", "3", "--size", "64",
                 "--seed", "1", "--out", str(tmp_path)]) == 0
    listing = json.loads((tmp_path / "maps.json").read_text())
    assert len(listing) == 3 and all(m["category"] == "walls" for m in listing)
    assert (tmp_path / "00002_map.pgm").exists()


@pytest.fixture(scope="module")
def gt(tmp_path_factory):
    out = tmp_path_factory.mktemp("gt")
    assert main(["gen-gt", "--category", "blocks", "--count", "2", "--size", "64",
                 "--runs", "5", "--stroke", "2", "--seed", "3", "--out", str(out)]) == 0
    return out


def test_gen_gt(gt):
    manifest = json.loads((gt / "manifest.json").read_text())
    assert len(manifest["samples"]) == 2 and manifest["runs"] == 5


def test_loss_and_grad(gt, tmp_path, capsys):
    truth = gt / "00000_00_edges.efld"
    f = read_efld(truth)
    pred = EdgeField((f.px * 0.8 + 0.1) * _valid(f, 0), (f.py * 0.8 + 0.1) * _valid(f, 1))
    write_efld(tmp_path / "pred.efld", pred)
    rc = main(["loss", "--truth", str(truth), "--region", str(gt / "00000_00_region.pgm"),
               "--pred", str(tmp_path / "pred.efld"), "--out", str(tmp_path / "r.json"),
               "--grad-out", str(tmp_path / "g.efld")])
    assert rc == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert set(rep) == {"bce", "dice", "conn", "total"}
    assert rep["total"] == pytest.approx(rep["bce"] + rep["dice"] + rep["conn"])
    assert (tmp_path / "g.efld").read_bytes()[:4] == b"EFLD"


def _valid(f, channel):
    m = np.ones(f.shape)
    if channel == 0:
        m[:, -1] = 0
    else:
        m[-1, :] = 0
    return m


def test_loss_grad_check(capsys):
    assert main(["loss", "--grad-check", "--fields", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert max(out["max_relative_error"].values()) < 1e-4


def test_bench_plan_and_sweep(tmp_path, capsys):
    assert main(["bench", "export-fixtures", "--out", str(tmp_path / "fx")]) == 0
    fx = tmp_path / "fx"
    args = ["--planner", "rrt", "--map", str(fx / "two-passage.pgm"),
            "--problem", str(fx / "two-passage.json"),
            "--region", str(fx / "two-passage_connected.pgm"), "--trials", "3", "--seed", "2"]
    assert main(["bench", "plan", *args, "--hb", "0.5", "--out", str(tmp_path / "p")]) == 0
    assert (tmp_path / "p" / "trials.csv").read_text().startswith(
        "trial,success,iterations,nodes,cost\n")
    assert main(["bench", "sweep", *args, "--biases", "0,0.9", "--out", str(tmp_path / "s")]) == 0
    assert (tmp_path / "s" / "hb_0.9" / "aggregate.json").exists()


def test_bench_plan_fixture_matches_files(tmp_path):
    main(["bench", "export-fixtures", "--out", str(tmp_path / "fx")])
    fx = tmp_path / "fx"
    main(["bench", "plan", "--fixture", "dead-end", "--fixture-region", "connected", "--hb", "0.9",
          "--trials", "2", "--out", str(tmp_path / "a")])
    main(["bench", "plan", "--map", str(fx / "dead-end.pgm"), "--problem",
          str(fx / "dead-end.json"), "--region", str(fx / "dead-end_connected.pgm"),
          "--hb", "0.9", "--trials", "2", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "trials.csv").read_bytes() == (tmp_path / "b" / "trials.csv").read_bytes()


def test_bench_eval(gt, tmp_path, capsys):
    for sid in ("00000_00", "00001_00"):
        (tmp_path / f"{sid}.efld").write_bytes((gt / f"{sid}_edges.efld").read_bytes())
    assert main(["bench", "eval", "--manifest", str(gt / "manifest.json"), "--pred",
                 str(tmp_path), "--threshold", "0.09", "--out", str(tmp_path / "e.json")]) == 0
    rep = json.loads((tmp_path / "e.json").read_text())
    assert rep["groups"]["all"]["connectivity_rate"] == 1.0


def test_error_exit(tmp_path, capsys):
    (tmp_path / "bad.pgm").write_bytes(b"P2\n")
    (tmp_path / "p.json").write_text("{}")
    rc = main(["bench", "plan", "--map", str(tmp_path / "bad.pgm"), "--problem",
               str(tmp_path / "p.json"), "--trials", "1"])
    assert rc == 2
    assert "ParseError" in capsys.readouterr().err
