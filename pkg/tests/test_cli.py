import json
import math
import os

import numpy as np


from pspect import cli
from pspect.radial_ivp import Problem
from pspect.spectrum import rayleigh_mu1
from pspect.weights import Weight

HERE = os.path.dirname(__file__)
CONFIGS = os.path.join(HERE, "..", "configs")


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_rows(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("k,") or line.startswith("r,") or line.startswith("gamma,"):
                continue
            rows.append(line.split(","))
    return rows


UNIT_EIG = {
    "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0]}},
    "task": {"kind": "eig", "K": 3, "nu": ["+"], "profiles": False},
}


def test_eig_closed_form_first_row(tmp_path):
    cfg = write_cfg(tmp_path, UNIT_EIG)
    out = str(tmp_path / "out")
    assert cli.main(["eig", "--config", cfg, "--out", out]) == 0
    rows = read_rows(os.path.join(out, "spectrum.csv"))
    k, nu, mu, zc, res = rows[0]
    assert (k, nu, zc) == ("1", "+", "0")
    assert abs(float(mu) - 2.4674011002723395) < 1e-7
    assert float(res) < 1e-9


def test_eig_negative_sequence_absent_exit_2(tmp_path, capsys):
    cfg_dict = json.loads(json.dumps(UNIT_EIG))
    cfg_dict["task"]["nu"] = ["-"]
    cfg = write_cfg(tmp_path, cfg_dict)
    out = str(tmp_path / "out")
    assert cli.main(["eig", "--config", cfg, "--out", out]) == 2
    assert "negative sequence absent" in capsys.readouterr().err


def test_eig_golden_file_and_rayleigh_cross_check(tmp_path):
    out = str(tmp_path / "out")
    code = cli.main(
        ["eig", "--config", os.path.join(CONFIGS, "demo_eig.json"), "--out", out]
    )
    assert code == 0
    got = read_rows(os.path.join(out, "spectrum.csv"))
    golden = read_rows(os.path.join(HERE, "golden", "spectrum.csv"))
    assert len(got) == len(golden)
    for g_row, w_row in zip(got, golden):
        assert g_row[0] == w_row[0] and g_row[1] == w_row[1] and g_row[3] == w_row[3]
        mu_g, mu_w = float(g_row[2]), float(w_row[2])
        assert abs(mu_g - mu_w) <= 1e-8 * abs(mu_w)
    # the golden mu_1^[+-] themselves are cross-checked by the variational oracle
    with open(os.path.join(CONFIGS, "demo_eig.json")) as fh:
        dem = json.load(fh)
    m = Weight.from_spec(dem["problem"]["weight"])
    prob = Problem.linear(dem["problem"]["p"], dem["problem"]["N"], m, math.nan)
    for nu in ("+", "-"):
        mu1 = next(float(r[2]) for r in golden if r[0] == "1" and r[1] == nu)
        ray = rayleigh_mu1(prob, nu)
        assert abs(ray.value - mu1) <= 1e-6 * abs(mu1)


def test_eig_determinism_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, UNIT_EIG)
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert cli.main(["eig", "--config", cfg, "--out", out1]) == 0
    assert cli.main(["eig", "--config", cfg, "--out", out2]) == 0
    b1 = open(os.path.join(out1, "spectrum.csv"), "rb").read()
    b2 = open(os.path.join(out2, "spectrum.csv"), "rb").read()
    assert b1 == b2


def test_eig_threaded_output_matches_sequential(tmp_path):
    cfg_dict = {
        "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0, -2.0]}},
        "task": {"kind": "eig", "K": 2, "nu": ["+", "-"], "profiles": False},
    }
    cfg = write_cfg(tmp_path, cfg_dict)
    out1, out2 = str(tmp_path / "seq"), str(tmp_path / "par")
    assert cli.main(["eig", "--config", cfg, "--out", out1, "--threads", "1"]) == 0
    assert cli.main(["eig", "--config", cfg, "--out", out2, "--threads", "4"]) == 0
    assert (
        open(os.path.join(out1, "spectrum.csv"), "rb").read()
        == open(os.path.join(out2, "spectrum.csv"), "rb").read()
    )


def test_eig_profiles_emitted(tmp_path):
    cfg_dict = json.loads(json.dumps(UNIT_EIG))
    cfg_dict["task"]["profiles"] = True
    cfg_dict["task"]["K"] = 2
    cfg = write_cfg(tmp_path, cfg_dict)
    out = str(tmp_path / "out")
    assert cli.main(["eig", "--config", cfg, "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "eigfun_k1_plus.csv"))
    assert os.path.exists(os.path.join(out, "eigfun_k2_plus.csv"))
    rows = read_rows(os.path.join(out, "eigfun_k1_plus.csv"))
    rs = np.array([float(r[0]) for r in rows])
    us = np.array([float(r[1]) for r in rows])
    assert np.max(np.abs(us - np.cos(math.pi * rs / 2))) < 1e-8


def test_csv_headers_carry_hash_and_tolerances(tmp_path):
    cfg = write_cfg(tmp_path, UNIT_EIG)
    out = str(tmp_path / "out")
    cli.main(["eig", "--config", cfg, "--out", out, "--tol-rel", "1e-9"])
    head = open(os.path.join(out, "spectrum.csv")).read().splitlines()[:3]
    assert head[0].startswith("# pspect v")
    assert head[1].startswith("# config_sha256=")
    assert "tol_rel=1.0000000000000001e-09" in head[2] or "tol_rel=1e-09" in head[2]


def test_branch_constant_gamma_for_homogeneous_family(tmp_path):
    cfg = {
        "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0]}},
        "task": {
            "kind": "branch", "k": 1, "sigma": "+", "nu": "+",
            "f": {"family": "phi"},
            "alpha_min": 1e-2, "alpha_max": 1e2,
        },
    }
    path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "out")
    assert cli.main(["branch", "--config", path, "--out", out]) == 0
    rows = read_rows(os.path.join(out, "branch_k1_plus.csv"))
    gammas = np.array([float(r[0]) for r in rows])
    lam1 = (math.pi / 2) ** 2
    assert np.max(np.abs(gammas - lam1)) < 1e-7 * lam1


def test_branch_reference_endpoint_comments(tmp_path):
    out = str(tmp_path / "out")
    code = cli.main(
        ["branch", "--config", os.path.join(CONFIGS, "demo_branch.json"), "--out", out]
    )
    assert code == 0
    text = open(os.path.join(out, "branch_k1_plus.csv")).read()
    gamma0 = float(text.split("# gamma_0=")[1].splitlines()[0])
    lam1 = (math.pi / 2) ** 2
    assert abs(gamma0 - lam1) <= 0.02 * lam1
    assert "# gamma_inf=" in text
    assert os.path.exists(os.path.join(out, "branch_k1_plus.svg"))
    svg = open(os.path.join(out, "branch_k1_plus.svg")).read()
    assert "<polyline" in svg and "<svg" in svg


def test_branch_determinism(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    cfgp = os.path.join(CONFIGS, "demo_branch.json")
    assert cli.main(["branch", "--config", cfgp, "--out", out1]) == 0
    assert cli.main(["branch", "--config", cfgp, "--out", out2]) == 0
    assert (
        open(os.path.join(out1, "branch_k1_plus.csv"), "rb").read()
        == open(os.path.join(out2, "branch_k1_plus.csv"), "rb").read()
    )


def test_malformed_config_line_column_diagnostic(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"problem": {"p": 2.0,\n  "weight": }}')
    out = str(tmp_path / "out")
    assert cli.main(["eig", "--config", str(bad), "--out", out]) == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_unknown_key_rejected(tmp_path, capsys):
    cfg_dict = json.loads(json.dumps(UNIT_EIG))
    cfg_dict["task"]["extra_knob"] = 1
    cfg = write_cfg(tmp_path, cfg_dict)
    assert cli.main(["eig", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "extra_knob" in capsys.readouterr().err


def test_malformed_weight_spec_rejected(tmp_path, capsys):
    cfg_dict = json.loads(json.dumps(UNIT_EIG))
    cfg_dict["problem"]["weight"] = {"expr": "poly", "coeffs": [1.0], "junk": 2}
    cfg = write_cfg(tmp_path, cfg_dict)
    assert cli.main(["eig", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "problem.weight" in capsys.readouterr().err


def test_command_kind_mismatch_rejected(tmp_path, capsys):
    cfg = write_cfg(tmp_path, UNIT_EIG)
    assert cli.main(["branch", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_verify_empty_checks_exit_0(tmp_path):
    cfg = {
        "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0]}},
        "task": {"kind": "verify", "checks": []},
    }
    path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "out")
    assert cli.main(["verify", "--config", path, "--out", out]) == 0
    report = open(os.path.join(out, "report.txt")).read()
    assert "verification report" in report


def test_verify_sturm_violation_exit_3(tmp_path):
    out = str(tmp_path / "out")
    code = cli.main(
        ["verify", "--config", os.path.join(CONFIGS, "verify_sturm_bad.json"),
         "--out", out]
    )
    assert code == 3
    report = open(os.path.join(out, "report.txt")).read()
    assert "PRECONDITION VIOLATION" in report


def test_verify_small_suite_passes(tmp_path):
    cfg = {
        "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0, -2.0]}},
        "task": {
            "kind": "verify",
            "checks": [
                {"check": "spectrum_structure", "K": 2, "nu": ["+", "-"]},
                {"check": "sturm",
                 "b1": {"expr": "poly", "coeffs": [22.0]},
                 "b2": {"expr": "poly", "coeffs": [62.0]}},
                {"check": "crossing_index", "K": 2},
            ],
        },
    }
    path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "out")
    assert cli.main(["verify", "--config", path, "--out", out]) == 0
    report = open(os.path.join(out, "report.txt")).read()
    assert report.count("[PASS]") == 3
    assert "[FAIL]" not in report


def test_gp_closed_form(tmp_path):
    cfg = {
        "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0]}},
        "task": {"kind": "gp", "h": {"expr": "poly", "coeffs": [1.0]}},
    }
    path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "out")
    assert cli.main(["gp", "--config", path, "--out", out]) == 0
    rows = read_rows(os.path.join(out, "gp_profile.csv"))
    rs = np.array([float(r[0]) for r in rows])
    us = np.array([float(r[1]) for r in rows])
    assert np.max(np.abs(us - (1 - rs**2) / 2)) < 1e-10


def test_nodal_command_reference(tmp_path):
    out = str(tmp_path / "out")
    code = cli.main(
        ["nodal", "--config", os.path.join(CONFIGS, "demo_nodal.json"), "--out", out]
    )
    assert code == 0
    files = os.listdir(out)
    assert any(f.startswith("nodal_k1_") for f in files)


def test_nodal_none_found_exit_2(tmp_path):
    cfg = {
        "problem": {"p": 2.0, "N": 1, "weight": {"expr": "poly", "coeffs": [1.0]}},
        "task": {
            "kind": "nodal", "gamma": 3.0, "k": 1, "sigma": "+",
            "f": {"family": "rational", "f0": 1.0, "finf": 2.0, "q": 2.0},
        },
    }
    path = write_cfg(tmp_path, cfg)
    out = str(tmp_path / "out")
    assert cli.main(["nodal", "--config", path, "--out", out]) == 2
    assert os.path.exists(os.path.join(out, "nodal_report.txt"))
