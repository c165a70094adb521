"""Config layering, CSV round-trips, scenario runners, and CLI exit codes."""

import numpy as np
import pytest

from obsent import ConfigError
from obsent.experiments import (
    PropertyResult,
    SuiteReport,
    get_scenario,
    load_config,
    read_csv,
    run_scenario,
    scenario_ids,
    write_csv,
)
from obsent.experiments import cli

SMALL_QUENCH = [
    "system.sites=8",
    "system.particles=2",
    "initial.sub_sites=4",
    "initial.index=2",
    "blocks.cuts=4",
    "grid.t_max=4.0",
    "grid.points=5",
]


def _cfg(scenario_id, overrides=()):
    return load_config(get_scenario(scenario_id).defaults, None, list(overrides))


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


def test_defaults_load_for_every_scenario():
    for sid in scenario_ids():
        cfg = _cfg(sid)
        assert len(cfg.hash()) == 16


def test_file_and_override_layering(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[grid]\nt_max = 10.0\n", encoding="utf-8")
    cfg = load_config(get_scenario("expansion").defaults, str(p),
                      ["grid.points=11"])
    assert cfg.get_float("grid.t_max") == 10.0
    assert cfg.get_int("grid.points") == 11
    # untouched keys keep their defaults
    assert cfg.get_int("system.sites") == 16


def test_unknown_keys_are_rejected(tmp_path):
    defaults = get_scenario("expansion").defaults
    with pytest.raises(ConfigError, match="unknown key"):
        load_config(defaults, None, ["grid.t_sax=10"])
    with pytest.raises(ConfigError, match="unknown section"):
        load_config(defaults, None, ["gird.t_max=10"])
    with pytest.raises(ConfigError, match="section.key=value"):
        load_config(defaults, None, ["grid.t_max"])
    p = tmp_path / "bad.ini"
    p.write_text("[grid]\nbogus = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="bogus"):
        load_config(defaults, str(p), [])
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(defaults, str(tmp_path / "missing.ini"), [])


def test_typed_getters():
    cfg = _cfg("s_ex_bins", ["bins.m_list=1, 8,64"])
    assert cfg.get_int_list("bins.m_list") == [1, 8, 64]
    with pytest.raises(ConfigError, match="expected integer"):
        cfg.get_int("chain.t")
    with pytest.raises(ConfigError, match="unknown config key"):
        cfg.get_str("grid.nope")


def test_hash_is_order_independent_and_value_sensitive():
    from obsent.experiments.config import RunConfig

    a = RunConfig.from_dict({"b": {"y": 2, "x": 1}, "a": {"k": "v"}})
    b = RunConfig.from_dict({"a": {"k": "v"}, "b": {"x": 1, "y": 2}})
    assert a.hash() == b.hash()
    c = RunConfig.from_dict({"a": {"k": "w"}, "b": {"x": 1, "y": 2}})
    assert a.hash() != c.hash()


# ---------------------------------------------------------------------------
# csv io
# ---------------------------------------------------------------------------


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    md = {"scenario": "demo", "alpha": 0.123456789012345, "n": 3}
    rows = [[0.0, 1.5], [2.0, -3.25e-11]]
    write_csv(path, md, ["t", "s"], rows)
    back_md, header, data = read_csv(path)
    assert header == ["t", "s"]
    assert back_md["scenario"] == "demo"
    assert float(back_md["alpha"]) == pytest.approx(0.123456789012345, rel=1e-11)
    assert data.shape == (2, 2)
    assert np.allclose(data, np.asarray(rows), rtol=1e-11)


def test_csv_float_formatting(tmp_path):
    path = tmp_path / "f.csv"
    write_csv(path, {}, ["x"], [[1.0 / 3.0]])
    text = path.read_text(encoding="utf-8")
    assert "0.333333333333" in text


# ---------------------------------------------------------------------------
# scenario runners
# ---------------------------------------------------------------------------


def test_expansion_runner_output_shape():
    cfg = _cfg("expansion", [
        "system.sites=8", "system.particles=2", "initial.sub_sites=4",
        "initial.index=1", "partition.boxes=4", "grid.t_max=3.0",
        "grid.points=7",
    ])
    md, header, rows = run_scenario("expansion", cfg)
    assert header[:2] == ["t", "s_pos"]
    assert len(rows) == 7
    assert rows[0][0] == 0.0 and rows[-1][0] == 3.0
    t = [r[0] for r in rows]
    assert t == sorted(t)
    assert md["scenario"] == "expansion"
    assert md["config_hash"] == cfg.hash()
    for row in rows:
        assert abs(row[header.index("norm_err")]) < 1e-10
        assert abs(row[header.index("energy_err")]) < 1e-9


def test_eigenstate_quench_runner_small_chain():
    cfg = _cfg("eigenstate_quench", SMALL_QUENCH)
    md, header, rows = run_scenario("eigenstate_quench", cfg)
    i_f = header.index("s_f")
    i_xe = header.index("s_xe")
    # the initial state is one factorized macrostate: S_F starts at zero
    assert rows[0][i_f] < 1e-9
    for row in rows:
        assert row[i_f] >= -1e-12 and row[i_xe] >= -1e-12
    assert "s_reference" in md


def test_runner_determinism():
    cfg = _cfg("eigenstate_quench", SMALL_QUENCH)
    md1, h1, r1 = run_scenario("eigenstate_quench", cfg)
    md2, h2, r2 = run_scenario("eigenstate_quench", cfg)
    assert h1 == h2
    assert r1 == r2
    md1.pop("created")
    md2.pop("created")
    assert md1 == md2


def test_property_suite_runner():
    cfg = _cfg("property_suite", [
        "suite.dims=4,5", "suite.trials=2", "suite.include_chain=0",
    ])
    md, header, rows = run_scenario("property_suite", cfg)
    assert md["suite_passed"] == 1
    assert header == ["property", "instances", "max_violation", "tolerance", "passed"]
    assert all(row[-1] for row in rows)


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        get_scenario("not_a_scenario")


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------


def test_cli_run_writes_csv(tmp_path, capsys):
    rc = cli.main(["run", "eigenstate_quench", "--out", str(tmp_path)]
                  + [f"--set={ov}" for ov in SMALL_QUENCH])
    assert rc == 0
    out = capsys.readouterr().out
    assert "wrote" in out
    md, header, data = read_csv(tmp_path / "eigenstate_quench.csv")
    assert md["scenario"] == "eigenstate_quench"
    assert data.shape == (5, len(header))


def test_cli_rerun_is_byte_stable_except_created(tmp_path):
    args = ["run", "expansion", "--set", "system.sites=6",
            "--set", "system.particles=2", "--set", "initial.sub_sites=3",
            "--set", "initial.index=1", "--set", "partition.boxes=3",
            "--set", "grid.t_max=2.0", "--set", "grid.points=4"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "expansion.csv").read_text(encoding="utf-8").splitlines()
    b = (tmp_path / "b" / "expansion.csv").read_text(encoding="utf-8").splitlines()
    assert len(a) == len(b)
    for la, lb in zip(a, b):
        if la.startswith("# created="):
            assert lb.startswith("# created=")
            continue
        assert la == lb


def test_cli_exit_code_config_errors(tmp_path, capsys):
    assert cli.main(["run", "no_such_scenario", "--out", str(tmp_path)]) == 2
    assert cli.main(["run", "expansion", "--out", str(tmp_path),
                     "--set", "grid.bogus=1"]) == 2
    # domain violation surfaces as a config problem too
    assert cli.main(["run", "expansion", "--out", str(tmp_path),
                     "--set", "system.sites=30"]) == 2
    err = capsys.readouterr().err
    assert "config error" in err


def test_cli_exit_code_capacity(tmp_path, capsys):
    rc = cli.main(["run", "expansion", "--out", str(tmp_path),
                   "--set", "system.sites=28", "--set", "system.particles=14",
                   "--set", "initial.sub_sites=14", "--set", "partition.boxes=4"])
    assert rc == 3
    assert "capacity" in capsys.readouterr().err


def test_cli_suite_pass(capsys):
    rc = cli.main(["suite", "--set", "suite.dims=4,5",
                   "--set", "suite.trials=2", "--set", "suite.include_chain=0"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "all invariants hold" in out


def test_cli_suite_failure_exit_code(monkeypatch, capsys):
    failing = SuiteReport(results=(
        PropertyResult(property_id="demo", instances=1, max_violation=1.0,
                       tolerance=0.0, passed=False),
    ))
    monkeypatch.setattr(cli, "run_property_suite",
                        lambda **kw: failing)
    rc = cli.main(["suite"])
    assert rc == 4
    assert "FAILED" in capsys.readouterr().err


def test_cli_list_and_describe(capsys):
    assert cli.main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for sid in scenario_ids():
        assert sid in out
    assert cli.main(["describe", "pure_thermal"]) == 0
    out = capsys.readouterr().out
    assert "[thermal]" in out and "beta = 1.0" in out
    assert cli.main(["describe", "nope"]) == 2
