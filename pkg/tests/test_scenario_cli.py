import math
from pathlib import Path

import pytest

from sidsim import cli
from sidsim.core import Role
from sidsim.network import AssignmentPlan, Objective
from sidsim.scenario import (ResultTable, ScenarioError, format_cell, load_scenario,
                             parse_scenario, preset_path, run_preset, run_sweep, simulate,
                             sweep_values)

GOLDEN = Path(__file__).parent / "golden"
EXAMPLE = GOLDEN / "two_links.toml"

MINIMAL = """
sids = ["sid"]
[[nodes]]
id = "alice"
role = "suspicious_tx"
x = 0.0
y = 0.0
tx_dbm = 43.0
[[nodes]]
id = "bob"
role = "suspicious_rx"
x = 0.0
y = 500.0
[[nodes]]
id = "sid"
role = "sid"
x = 0.0
y = 0.0
tx_dbm = 43.0
[[links]]
tx = "alice"
rx = "bob"
band = "b1"
"""


def test_fig4_preset_file_parameters():
    sf = load_scenario(preset_path("fig4"))
    alice, bob = sf.scenario.node("alice"), sf.scenario.node("bob")
    assert (alice.position.x, alice.position.y, alice.tx_power_dbm) == (0.0, 0.0, 43.0)
    assert (bob.position.x, bob.position.y) == (0.0, 500.0)
    assert all(n.noise_power_dbm == -80.0 for n in sf.scenario.nodes)
    assert sf.scenario.node("sid").role is Role.SID
    assert sf.sweep.values()[-1] == 1500.0 and len(sf.sweep.values()) == 151


def test_minimal_file_defaults():
    sf = parse_scenario(MINIMAL)
    assert sf.sweep is None and sf.harq is None and sf.seed == 0
    assert sf.scenario.bands == ["b1"]
    assert sf.scenario.node("bob").tx_power_dbm == -math.inf


@pytest.mark.parametrize("patch, needle", [
    ('\n[channel]\nexponent = 3.0\n', "'exponent'"),
    ('\ncolour = "red"\n', "'colour'"),
    ('\n[sweep]\nstart = 0.0\nstop = 1.0\nstep = 1.0\nspeed = 2\n', "'speed'"),
])
def test_unknown_key_is_named(patch, needle):
    with pytest.raises(ScenarioError, match=needle):
        parse_scenario(MINIMAL + patch)


def test_unknown_key_inside_node():
    bad = MINIMAL.replace('id = "bob"', 'id = "bob"\ncolor = 1')
    with pytest.raises(ScenarioError, match=r"nodes\[1\].*'color'"):
        parse_scenario(bad)


def test_dangling_reference():
    bad = MINIMAL.replace('rx = "bob"', 'rx = "eve"')
    with pytest.raises(ScenarioError, match="'eve'"):
        parse_scenario(bad)


def test_negative_cap_rejected():
    bad = MINIMAL + '[[legit]]\nnode = "bob"\nband = "b1"\nmax_interference_w = -1.0\n'
    with pytest.raises(ScenarioError, match="negative power"):
        parse_scenario(bad)


@pytest.mark.parametrize("patch, needle", [
    (('tx_dbm = 43.0', 'tx_dbm = "loud"'), "tx_dbm"),
    (('role = "sid"', 'role = "dog"'), "role"),
    (('x = 0.0\ny = 0.0\ntx_dbm = 43.0\n[[links]]', 'x = 0.0\ny = 0.0\n[[links]]'), "tx_dbm"),
])
def test_field_errors_name_the_field(patch, needle):
    with pytest.raises(ScenarioError, match=needle):
        parse_scenario(MINIMAL.replace(*patch))


def test_sid_must_have_sid_role():
    with pytest.raises(ScenarioError, match="role 'sid'"):
        parse_scenario(MINIMAL.replace('sids = ["sid"]', 'sids = ["bob"]'))


def test_parse_error_mentions_line():
    with pytest.raises(ScenarioError, match="broken.toml.*line 2"):
        parse_scenario('sids = ["a"]\nx = \ny = 1\n', source="broken.toml")
    with pytest.raises(ScenarioError, match="line 4"):
        parse_scenario('sids = ["a"]\n\nnodes = [[\n', source="broken.toml")


def test_unreadable_file(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario(tmp_path / "missing.toml")


def test_seed_must_be_u64():
    with pytest.raises(ScenarioError, match="seed"):
        parse_scenario("seed = -1\n" + MINIMAL)


@pytest.mark.parametrize("value, text", [
    (0.0, "0.000000"), (-0.0, "0.000000"), (-1e-9, "0.000000"), (4.0842431, "4.084243"),
    (-math.inf, "-300.000000"), (math.inf, "300.000000"), (3, "3"), ("relay", "relay"),
])
def test_format_cell(value, text):
    assert format_cell(value) == text


def test_nan_never_reaches_a_table():
    with pytest.raises(ValueError):
        format_cell(math.nan)


def test_table_is_rectangular():
    with pytest.raises(ValueError):
        ResultTable(["a", "b"], [(1.0,)])


def test_sweep_values_have_no_drift():
    xs = sweep_values(0.0, 1500.0, 10.0)
    assert len(xs) == 151 and xs[-1] == 1500.0 and xs[37] == 370.0
    assert sweep_values(5.0, 5.0, 1.0) == [5.0]
    with pytest.raises(Exception):
        sweep_values(0.0, 1.0, 0.0)


# -- golden files -------------------------------------------------------------

def test_example_simulate_golden():
    got = simulate(load_scenario(EXAMPLE)).to_csv()
    assert got == (GOLDEN / "two_links_simulate.csv").read_text()


def test_example_sweep_golden(tmp_path):
    out = tmp_path / "sweep.csv"
    run_sweep(load_scenario(EXAMPLE), out)
    assert out.read_bytes() == (GOLDEN / "two_links_sweep.csv").read_bytes()


@pytest.mark.parametrize("objective, name", [("max_total_eav_rate", "two_links_opt_eav.csv"),
                                             ("min_total_malicious_rate", "two_links_opt_mal.csv")])
def test_example_optimize_golden(tmp_path, objective, name):
    out = tmp_path / "plan.csv"
    assert cli.main(["optimize", str(EXAMPLE), "--objective", objective, "--out", str(out)]) == 0
    assert out.read_bytes() == (GOLDEN / name).read_bytes()


@pytest.mark.parametrize("name", ["fig4", "fig6"])
def test_preset_golden(name):
    assert run_preset(name).to_csv() == (GOLDEN / f"{name}.csv").read_text()


def test_repo_example_matches_golden_copy():
    repo_copy = Path(__file__).parents[1] / "scenarios" / "two_links.toml"
    assert repo_copy.read_text() == EXAMPLE.read_text()


# -- presets and sweeps ---------------------------------------------------------

def test_fig4_rows():
    table = run_preset("fig4")
    assert table.columns == ["x_m", "passive_bpshz", "proactive_bpshz"]
    x0 = table.rows[0]
    assert (x0[0], round(x0[1], 2), round(x0[2], 2)) == (0.0, 4.08, 6.02)
    assert all(r[2] == 0.0 for r in table.rows if r[0] > 1240)
    assert len(table.rows) == 151


def test_fig6_sign_change():
    table = run_preset("fig6")
    assert table.columns == ["x_m", "direct_db", "symbol_level_db"]
    by_x = {r[0]: r for r in table.rows}
    assert by_x[1100.0][2] > 0 > by_x[1120.0][2]


def test_unknown_preset():
    with pytest.raises(Exception, match="fig5"):
        run_preset("fig5")


def test_single_point_sweep():
    sf = parse_scenario(MINIMAL + "[sweep]\nstart = 230.0\nstop = 230.0\nstep = 10.0\n")
    table = run_sweep(sf)
    assert len(table.rows) == 1 and table.rows[0][0] == 230.0


def test_sweep_needs_section():
    with pytest.raises(ScenarioError, match="sweep"):
        run_sweep(parse_scenario(MINIMAL))


def test_repeated_sweep_identical(tmp_path):
    sf = load_scenario(preset_path("fig6"))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(sf, a)
    run_sweep(sf, b, jobs=3)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("name", ["fig4", "fig6"])
def test_preset_file_equals_builtin(tmp_path, name):
    out = tmp_path / "f.csv"
    run_sweep(load_scenario(preset_path(name)), out)
    assert out.read_text() == run_preset(name).to_csv()


def test_harq_columns_follow_seed():
    sf = load_scenario(EXAMPLE)
    a = simulate(sf, seed=1).to_csv()
    assert a == simulate(sf, seed=1).to_csv()
    assert a != simulate(sf, seed=2).to_csv()


# -- command line ---------------------------------------------------------------

def test_cli_figure_and_flags_anywhere(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["figure", "fig4", "--out", str(a)]) == 0
    assert cli.main(["--format", "csv", "--seed", "3", "figure", "fig4", "--out", str(b),
                     "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_simulate_to_stdout(capsys):
    assert cli.main(["simulate", str(EXAMPLE)]) == 0
    assert capsys.readouterr().out == (GOLDEN / "two_links_simulate.csv").read_text()


def test_cli_validation_errors(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(MINIMAL + "\nmystery = 1\n")
    assert cli.main(["simulate", str(bad)]) == 2
    assert "mystery" in capsys.readouterr().err
    assert cli.main(["sweep", str(tmp_path / "none.toml"), "--out", str(tmp_path / "o")]) == 2
    # unwritable output path
    assert cli.main(["figure", "fig6", "--out", str(tmp_path / "no" / "dir" / "x.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["figure", "fig9", "--out", "x"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["--seed", str(2 ** 64), "simulate", str(EXAMPLE)])
    assert exc.value.code == 2


def test_cli_infeasible_exit_code(monkeypatch, capsys):
    def infeasible(scenario, objective, method="auto"):
        return AssignmentPlan({}, objective, 0.0, {"user": -1.0}, [], feasible=False)

    monkeypatch.setattr(cli, "optimize_assignment", infeasible)
    code = cli.main(["optimize", str(EXAMPLE), "--objective", Objective.MAX_TOTAL_EAV_RATE.value])
    assert code == 3
    assert "interference cap" in capsys.readouterr().err
