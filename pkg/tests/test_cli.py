import csv

import numpy as np
import pytest

from ridgeboost.cli import fmt, main, parse_functionals, read_config_text, read_table, resolve_config
from ridgeboost.exceptions import ConfigError, SchemaError


def _write_data(path, X, y=None, names=None):
    names = names or [f"x{j}" for j in range(X.shape[1])]
    cols = X if y is None else np.column_stack([X, y])
    header = names + ([] if y is None else ["y"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows([[fmt(v) for v in row] for row in cols])


def _cfg(path, **kv):
    path.write_text("# test config\n" + "".join(f"{k} = {v}\n" for k, v in kv.items()))
    return str(path)


def _rows(path):
    with open(path) as fh:
        return [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))]


# -- configuration ------------------------------------------------------------


def test_config_parsing_and_resolution():
    raw = read_config_text("lambda = 0.5  # trailing comment\n\n# full comment\nseed=3\n")
    text, cfg = resolve_config("estimate", raw, seed=9)
    assert cfg["lambda"] == 0.5 and cfg["seed"] == 9 and text["seed"] == "9"
    assert "n_grid" not in text and text["outcome"] == "y"
    with pytest.raises(ConfigError, match="unknown key 'colour'"):
        read_config_text("colour = red\n")
    with pytest.raises(ConfigError, match="key = value"):
        read_config_text("just words\n")
    with pytest.raises(ConfigError, match="lambda"):
        resolve_config("audit", {"lambda": "0"})
    with pytest.raises(ConfigError, match="replications"):
        resolve_config("simulate", {"replications": "many"})


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(fmt(x)) == x
    assert fmt(np.float64(1.0) / 3) == "0.33333333333333331"
    assert fmt(3) == "3" and fmt(True) == "true"


def test_functional_specs(rng):
    X = rng.normal(size=(10, 3))
    cols = ["a", "b", "age"]
    fam = parse_functionals("missing_mean; avg_derivative(b, 0.2); counterfactual(j=age, a=65..89)", cols, X)
    assert len(fam) == 27
    assert fam[1].label == "avg_derivative(b)"
    assert fam[2].label == "counterfactual(age=65)" and fam[-1].label == "counterfactual(age=89)"
    assert len(parse_functionals("avg_derivative(0)", cols, X)) == 1
    for bad in ("median", "avg_derivative()", "counterfactual(age)", "counterfactual(zz, 1)", "avg_derivative(a, -1)", ""):
        with pytest.raises(ConfigError):
            parse_functionals(bad, cols, X)


def test_ragged_row_names_line(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,y\n1,2,3\n4,5\n")
    with pytest.raises(SchemaError, match="line 3"):
        read_table(p)
    p.write_text("a,b,y\n1,,3\n")
    with pytest.raises(SchemaError, match="line 2.*missing"):
        read_table(p)
    p.write_text("a,b,y\n1,x,3\n")
    with pytest.raises(SchemaError, match="non-numeric"):
        read_table(p)


# -- commands ----------------------------------------------------------------


def test_estimate_self_target_noiseless(tmp_path, rng):
    X = rng.normal(size=(100, 2))
    y = X @ [2.0, -1.0] + 4.0
    _write_data(tmp_path / "src.csv", X, y)
    _write_data(tmp_path / "tgt.csv", X)
    cfg = _cfg(tmp_path / "e.cfg", source=tmp_path / "src.csv", target=tmp_path / "tgt.csv", features="polynomial", degree=1, init="zero", **{"lambda": "1e-10"})
    assert main(["estimate", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
    (row,) = _rows(tmp_path / "out" / "estimates.csv")
    assert list(row) == ["label", "theta_hat", "std_error", "ci_low", "ci_high", "mae_before", "mae_after", "equivalence_residual"]
    assert float(row["theta_hat"]) == pytest.approx(y.mean(), abs=1e-6)
    assert float(row["std_error"]) == pytest.approx(np.std(y, ddof=1) / 10, rel=1e-4)
    assert (tmp_path / "out" / "resolved.cfg").exists()


def test_estimate_counterfactual_grid_and_profile(tmp_path, rng):
    X = np.column_stack([rng.uniform(55, 95, 150), rng.normal(size=150)])
    y = 100 - X[:, 0] + rng.normal(size=150)
    _write_data(tmp_path / "src.csv", X, y, names=["age", "x"])
    cfg = _cfg(tmp_path / "c.cfg", source=tmp_path / "src.csv", functional="counterfactual(j=age, a=65..89)", n_components=50)
    assert main(["estimate", "--config", cfg, "--out", str(tmp_path / "e")]) == 0
    assert len(_rows(tmp_path / "e" / "estimates.csv")) == 25
    assert main(["profile", "--config", cfg, "--out", str(tmp_path / "p")]) == 0
    rows = _rows(tmp_path / "p" / "profile.csv")
    assert len(rows) == 25 and all(r["status"] == "ok" for r in rows)


def test_estimate_error_exit_codes(tmp_path, rng, capsys):
    (tmp_path / "bad.csv").write_text("x0,y\n1,2\n3\n")
    cfg = _cfg(tmp_path / "b.cfg", source=tmp_path / "bad.csv")
    assert main(["estimate", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    assert "line 3" in capsys.readouterr().err
    assert main(["estimate", "--config", _cfg(tmp_path / "m.cfg", source=tmp_path / "nope.csv"), "--out", str(tmp_path / "o")]) == 3
    assert main(["estimate", "--config", _cfg(tmp_path / "u.cfg", speed="fast"), "--out", str(tmp_path / "o")]) == 2
    assert main(["estimate", "--out", str(tmp_path / "o")]) == 2
    _write_data(tmp_path / "src.csv", rng.normal(size=(20, 2)), rng.normal(size=20))
    _write_data(tmp_path / "tgt.csv", rng.normal(size=(5, 3)))
    cfg = _cfg(tmp_path / "t.cfg", source=tmp_path / "src.csv", target=tmp_path / "tgt.csv")
    assert main(["estimate", "--config", cfg, "--out", str(tmp_path / "o")]) == 3


def test_audit(tmp_path, rng):
    X = rng.normal(size=(80, 2))
    y = np.sin(X[:, 0]) + 0.1 * rng.normal(size=80)
    _write_data(tmp_path / "src.csv", X, y)
    cfg = _cfg(tmp_path / "a.cfg", source=tmp_path / "src.csv", holdout=tmp_path / "src.csv", n_components=30, **{"lambda": "1e-9"})
    assert main(["audit", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    (row,) = _rows(tmp_path / "a" / "audit.csv")
    assert row["status"] == "PASS"
    assert float(row["mae_boosted"]) < 1e-3 * float(row["mae_init"])
    eig = _rows(tmp_path / "a" / "audit_eigenvalues.csv")
    assert len(eig) == 30 == int(row["n_eigenvalues"])
    cfg0 = _cfg(tmp_path / "z.cfg", source=tmp_path / "src.csv", **{"lambda": "0"})
    assert main(["audit", "--config", cfg0, "--out", str(tmp_path / "z")]) == 2


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_check_equivalence(tmp_path, seed, capsys):
    assert main(["check-equivalence", "--seed", str(seed), "--out", str(tmp_path)]) == 0
    assert "failures=0" in capsys.readouterr().out
    assert "seed = %d" % seed in (tmp_path / "resolved.cfg").read_text()


def test_check_equivalence_negative_control(tmp_path):
    assert main(["check-equivalence", "--force-mismatch", "--out", str(tmp_path)]) == 1


def test_simulate_minimal_and_reproducible(tmp_path):
    cfg = _cfg(tmp_path / "s.cfg", n_grid="50", mu_grid="0", replications=1, n_components=20)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    rows = _rows(tmp_path / "a" / "coverage.csv")
    assert [r["method"] for r in rows] == ["naive", "boosted"]
    assert (tmp_path / "a" / "coverage.csv").read_text().rstrip().endswith("# failed_estimates=0")
    svg = (tmp_path / "a" / "figure1.svg").read_text()
    assert svg.startswith("<svg") and "stroke-dasharray" in svg and "target mu = 0" in svg
    # the echoed config reproduces the run exactly
    resolved = str(tmp_path / "a" / "resolved.cfg")
    assert main(["simulate", "--config", resolved, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "coverage.csv").read_bytes() == (tmp_path / "b" / "coverage.csv").read_bytes()
    assert (tmp_path / "a" / "resolved.cfg").read_bytes() == (tmp_path / "b" / "resolved.cfg").read_bytes()


def test_simulate_default_grid_cardinality():
    _, cfg = resolve_config("simulate", {})
    assert len(cfg["n_grid"]) * len(cfg["mu_grid"]) * 2 == 18
    assert cfg["replications"] == 500


def test_figure_has_one_panel_per_mu(tmp_path):
    cfg = _cfg(tmp_path / "s.cfg", n_grid="40,60", mu_grid="-1,0,1", replications=1, n_components=10)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert len(_rows(tmp_path / "coverage.csv")) == 12
    svg = (tmp_path / "figure1.svg").read_text()
    assert svg.count("target mu =") == 3
    assert svg.count("stroke-dasharray") == 3
