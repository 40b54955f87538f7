import json
import math

import numpy as np
import pytest

from flrw_kg.cli import main
from flrw_kg.config import RunConfig
from flrw_kg.errors import ConfigError
from flrw_kg.waveprop import sobolev_norm

SMALL = {
    "model": {"n": 1, "M": 2.0},
    "grid": {"points": 16},
    "data": {"phi0": [{"type": "constant", "value": 0.2}, {"type": "mode", "amplitude": 1.0, "k": 1}],
             "phi1": [{"type": "mode", "k": 2, "phase": "sin", "amplitude": 0.5}]},
    "time": {"start": 0.5, "stop": 2.0, "count": 4},
}


def write(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(tmp_path, command, doc, *extra, out="out"):
    cfg = write(tmp_path, doc)
    return main([command, "--config", cfg, "--out", str(tmp_path / out), *extra])


@pytest.mark.parametrize("doc", [SMALL, {"model": {"n": 3, "m_sq": -1.75}}, {"model": {"M": [0.5, 0.2]}}])
def test_dump_roundtrip(doc):
    cfg = RunConfig.from_dict(doc)
    assert RunConfig.from_dict(json.loads(cfg.dump())).dump() == cfg.dump()


@pytest.mark.parametrize("doc,where", [
    ({"model": {"mass": 1}}, "model.mass"),
    ({"grid": {"points": "many"}}, "grid.points"),
    ({"model": {"m_sq": [1, 2, 3]}}, "model.m_sq"),
    ({"data": {"phi0": [{"type": "mode", "wavenumber": 2}]}}, "data.phi0[0].wavenumber"),
    ({"data": {"phi1": [{"type": "spike"}]}}, "data.phi1[0]"),
    ({"model": {"M": 1.0, "m_sq": 0.5}}, "model"),
    ({"grid": {"dims": 4}}, "grid.dims"),
    ({"time": {"t_grid": [1.0, 0.5]}}, "time"),
    ({"stepper": {"blowup_threshold": 10.0}}, "stepper"),
])
def test_config_errors_carry_a_location(doc, where):
    with pytest.raises(ConfigError) as info:
        RunConfig.from_dict(doc)
    assert info.value.location == where


def test_complex_M_and_mass_squared():
    assert RunConfig.from_dict({"model": {"M": [0.5, 0.25]}}).model().mass.M == 0.5 + 0.25j
    p = RunConfig.from_dict({"model": {"n": 3, "M": None, "m_sq": -1.75}}).model()
    assert p.mass.M == pytest.approx(2.0)


def test_data_norm_rescaling():
    cfg = RunConfig.from_dict({**SMALL, "data": {**SMALL["data"], "norm": 1e-3}})
    phi0, phi1 = cfg.initial_data()
    assert sobolev_norm(phi0, 1.0) + sobolev_norm(phi1, 1.0) == pytest.approx(1e-3, rel=1e-12)


def test_field_terms():
    cfg = RunConfig.from_dict({"grid": {"points": 64}, "data": {"phi0": [
        {"type": "gaussian", "amplitude": 2.0, "center": math.pi, "width": 0.5}]}})
    f = cfg.field("phi0")
    assert f.values.max() == pytest.approx(2.0)
    assert f.grid.axis[np.argmax(f.values)] == pytest.approx(math.pi)


def test_solve_linear_writes_outputs_and_is_reproducible(tmp_path, capsys):
    assert run(tmp_path, "solve-linear", SMALL, out="a") == 0
    assert run(tmp_path, "solve-linear", SMALL, out="b") == 0
    for name in ("trace.csv", "summary.json", "comparison.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header = (tmp_path / "a" / "trace.csv").read_text().splitlines()[0]
    assert header.startswith("t,")
    assert json.loads((tmp_path / "a" / "comparison.json").read_text())["pass"] is True


def test_oracle_mismatch_exit_code(tmp_path):
    doc = {**SMALL, "oracle": {"rtol": 1e-300}}
    assert run(tmp_path, "solve-linear", doc) == 3


def test_config_error_exit_code_and_stderr(tmp_path, capsys):
    assert run(tmp_path, "classify", {"model": {"bogus": 1}}) == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "ConfigError" and err["location"] == "model.bogus"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["classify", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["no-such-command"]) == 2


def test_runtime_error_exit_code(tmp_path, capsys):
    doc = {"model": {"n": 1, "M": 1.0, "alpha": 2.0, "gamma": -1.5, "Gamma": 4.0},
           "grid": {"points": 16, "length": 2 * math.pi * 8 * math.exp(2.0)},
           "data": {"phi0": [{"type": "constant", "value": 5.0}]},
           "time": {"t_grid": [1.0, 2.0]},
           "semilinear": {"T": 2.0, "nodes": 6}}
    assert run(tmp_path, "solve-semilinear", doc) == 1
    assert json.loads(capsys.readouterr().err.strip())["error"] == "NoContraction"


def test_dump_config_flag(capsys):
    assert main(["classify", "--dump-config"]) == 0
    dumped = json.loads(capsys.readouterr().out)
    assert dumped["model"]["M"] == 2.0 and "semilinear" in dumped


def test_classify_command(tmp_path):
    doc = {"model": {"n": 1, "M": 1.0, "alpha": 2.0, "gamma": -1.5, "Gamma": 4.0}}
    assert run(tmp_path, "classify", doc) == 0
    assert json.loads((tmp_path / "out" / "verdict.json").read_text())["case"] == "I"


def test_domain_and_certify_with_plots(tmp_path):
    assert run(tmp_path, "domain", {"domain": {"panel": "a", "count": 300}}, "--plot", out="d") == 0
    assert (tmp_path / "d" / "domain.png").stat().st_size > 0
    assert (tmp_path / "d" / "domain.csv").read_text().startswith("M,gamma,Gamma,case")
    doc = {"certify": {"a": [0.0], "M": [0.5], "t": {"start": 0.5, "stop": 2.0, "count": 3}}}
    assert run(tmp_path, "certify-kernels", doc, "--plot", out="c") == 0
    assert list((tmp_path / "c").glob("*.png"))
    rows = (tmp_path / "c" / "certify.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 3


def test_oracle_and_semilinear_commands(tmp_path):
    assert run(tmp_path, "oracle", SMALL, out="o") == 0
    assert (tmp_path / "o" / "oracle_trace.csv").exists()
    doc = {**SMALL, "model": {"n": 1, "M": 2.0, "nonlinearity": {"coeff": 0.1}},
           "semilinear": {"method": "mol", "T": 2.0}}
    assert run(tmp_path, "solve-semilinear", doc, out="m") == 0
    assert json.loads((tmp_path / "m" / "report.json").read_text())["method"] == "mol"
