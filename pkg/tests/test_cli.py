import json
import math
import os
from pathlib import Path

import pytest

from curvedecay.cli import main
from curvedecay.config import load_config, resolve_out_dir
from curvedecay.errors import ConfigError

CURVES = Path(__file__).resolve().parent.parent / "configs" / "curves"


def _write_curve(tmp_path):
    doc = {"id": "m3", "dim": 3, "kind": "poly",
           "coords": [[0, 1], [0, 0, 1], [0, 0, 0, 1]], "interval": [-1, 1]}
    p = tmp_path / "m3.json"
    p.write_text(json.dumps(doc))
    return p


def test_theory_exact_output(tmp_path):
    rc = main(["theory", "--d", "3", "--K", "3", "--q", "7", "4",
               "--out", str(tmp_path)])
    assert rc == 0
    lines = [l for l in (tmp_path / "theory_d3_K3.csv").read_text().splitlines()
             if not l.startswith("#")]
    assert lines[0].startswith("d,K,q_num")
    assert lines[1] == "3,3,7,1,3,7,3,0,1"
    assert lines[2] == "3,3,4,1,1,2,2,1,4"


def test_theory_breakpoints_and_svg(tmp_path):
    rc = main(["theory", "--d", "10", "--K", "10", "--breakpoints", "--svg",
               "--out", str(tmp_path)])
    assert rc == 0
    svg = (tmp_path / "theory_breakpoints_d10_K10.svg").read_text()
    assert svg.startswith("<svg") and "<path" in svg
    csv = (tmp_path / "theory_breakpoints_d10_K10.csv").read_text()
    assert "10,10,1,2,1,2" in csv
    assert csv.strip().splitlines()[-1] == "10,10,0,1,1,10"


def test_theory_usage_error(tmp_path):
    rc = main(["theory", "--d", "3", "--K", "3", "--out", str(tmp_path)])
    assert rc == 2


def test_fit_on_synthetic_series_is_exact(tmp_path):
    rows = ["curve_id,d,K,q,R,Gq,m,resolved_fraction"]
    for j in range(4, 12):
        R = float(2 ** j)
        rows.append(f"syn,3,3,2,{R},{R ** -0.4:.17g},32,1")
    src = tmp_path / "series.csv"
    src.write_text("\n".join(rows) + "\n")
    rc = main(["fit", str(src), "--out", str(tmp_path)])
    assert rc == 0
    doc = json.loads((tmp_path / "fit_syn_q2.json").read_text())
    assert abs(doc["sigma_hat"] - 0.4) < 1e-9
    assert abs(doc["beta_hat"]) < 1e-9
    assert doc["prediction"]["sigma"] == [1, 2]


def test_gq_pipeline_and_determinism(tmp_path):
    curve = _write_curve(tmp_path)
    cfg = {"curve": str(curve), "seed": 3,
           "gq": {"q": [2], "r_values": [16, 24, 32, 48, 64],
                  "cutoff": {"center": 0.0, "half_width": 0.5,
                             "family": "bump"}}}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["gq", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["gq", "--config", str(cfg_path), "--out", str(out2),
                 "--workers", "3"]) == 0
    a = (out1 / "gq_m3.csv").read_bytes()
    b = (out2 / "gq_m3.csv").read_bytes()
    assert a == b


def test_config_schema_rejection(tmp_path):
    curve = _write_curve(tmp_path)
    bad = {"curve": str(curve), "gq": {"q": [2], "bogus_key": 1}}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    rc = main(["gq", "--config", str(p), "--out", str(tmp_path)])
    assert rc == 2
    top = {"curve": str(curve), "not_a_section": {}}
    p.write_text(json.dumps(top))
    assert main(["gq", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_missing_curve_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"curve": "nowhere.json", "gq": {"q": [2]}}))
    assert main(["gq", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_witness_zero_acceptance_exit_code(tmp_path):
    curve = _write_curve(tmp_path)
    cfg = {"curve": str(curve), "seed": 1,
           "witness": {"mode": "cap", "k": 3, "epsilon": 0.01,
                       "r_values": [1e6], "n": [50], "verify": False}}
    p = tmp_path / "w.json"
    p.write_text(json.dumps(cfg))
    rc = main(["witness", "--config", str(p), "--out", str(tmp_path)])
    assert rc == 3
    text = (tmp_path / "witness_m3_k3.csv").read_text()
    assert "min_scaled_FR" in text


def test_out_dir_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("CURVEDECAY_OUT", str(tmp_path / "envout"))
    rc = main(["airy", "--tau-min", "-2", "--tau-max", "1", "--step", "1"])
    assert rc == 0
    assert (tmp_path / "envout" / "airy.csv").exists()


def test_lemma_commands(tmp_path):
    rc = main(["lemma51", "--k", "3", "--lam", "1e3", "1e4", "1e5",
               "--out", str(tmp_path)])
    assert rc == 0
    body = (tmp_path / "lemma51_k3.csv").read_text()
    assert "# passed=1" in body
    rc = main(["lemma52", "--lam", "1e3", "--theta", "0.01",
               "--out", str(tmp_path)])
    assert rc == 0
    assert "# fitted_C=" in (tmp_path / "lemma52.csv").read_text()


def test_shipped_curve_files_load():
    from curvedecay.curve import load_curve
    for name in ("moment3.json", "helix.json", "parabola3.json",
                 "moment4.json"):
        c = load_curve(CURVES / name)
        assert c.dim in (3, 4)


def test_config_provenance_hash(tmp_path):
    curve = _write_curve(tmp_path)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"curve": str(curve), "gq": {"q": [2]}}))
    cfg = load_config(p)
    assert cfg.config_hash.startswith("sha256:")
    with pytest.raises(ConfigError):
        cfg.envelope_params(cfg.load_curve())
