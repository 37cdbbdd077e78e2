import io
import json
import subprocess
import sys

import pytest

from secsat import cli
from secsat.errors import ScenarioError
from secsat.experiments import (
    CSV_HEADER,
    SopCurve,
    emit_csv,
    format_csv,
    load_scenario,
    preset,
    read_csv,
    run_scenario,
    scenario_from_dict,
)

SMALL = dict(
    figure_id="custom",
    study="power_allocation",
    n_r=[2, 4],
    rate_thresholds=[1.0, 2.0],
    power_grid_db=[8.0, 12.0],
    k_sd=5.0,
    relay_link_model="rayleigh",
    trials=4000,
    seed=11,
)


def _write(tmp_path, data, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data, encoding="utf-8")
    return path


# ---------------------------------------------------------------- loading


def test_fig2_preset():
    s = load_scenario("fig2")
    assert s.rate_thresholds == (2.0,)
    assert s.n_r_values == [2, 4, 8]
    assert s.power_grid_db == tuple(float(p) for p in range(5, 16))
    assert s.k_sd_values == [10.0]
    assert [m.value for m in s.relay_models] == ["rayleigh"]
    assert s.relay_count == 4 and s.study == "relay_selection"


def test_fig4_preset():
    s = preset("fig4")
    assert s.rate_thresholds == (1.0,) and s.n_r_values == [4] and s.power_grid_db == (10.0,)
    assert s.k_re == 1.0 and len(s.k_sd_values) > 1 and s.x_name == "K_sd"


def test_unknown_preset():
    with pytest.raises(ScenarioError):
        preset("fig9")


def test_config_file_round_trip(tmp_path):
    s = load_scenario(_write(tmp_path, SMALL))
    assert s.n_r_values == [2, 4] and s.trials == 4000 and s.seed == 11
    again = load_scenario(_write(tmp_path, s.to_dict(), "again.json"))
    assert again == s


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ScenarioError, match="power_db"):
        load_scenario(_write(tmp_path, {**SMALL, "power_db": [1]}))


def test_zero_trials_rejected(tmp_path):
    with pytest.raises(ScenarioError, match="trials"):
        load_scenario(_write(tmp_path, {**SMALL, "trials": 0}))


def test_parse_error_reports_position(tmp_path):
    with pytest.raises(ScenarioError, match="line 3"):
        load_scenario(_write(tmp_path, '{\n  "n_r": 4,\n  "trials": ,\n}'))


def test_missing_file_is_an_os_error(tmp_path):
    with pytest.raises(OSError, match="nope.json"):
        load_scenario(tmp_path / "nope.json")


@pytest.mark.parametrize(
    "change",
    [
        dict(n_r=[]),
        dict(n_r=1),
        dict(rate_thresholds=[]),
        dict(k_sd=-1.0),
        dict(delta_alpha=0.5),
        dict(relay_link_model="gaussian"),
        dict(power_grid_db=[12.0, 8.0]),
        dict(k_sd=[1.0, 2.0]),
        dict(seed=-1),
        dict(study="other"),
        dict(schemes=["instantaneous"]),
        dict(relay_count=3),
        dict(mean_powers={"sd": 0.0}),
        dict(residual_law="exact"),
    ],
)
def test_invalid_scenarios_rejected(change):
    with pytest.raises(ScenarioError):
        scenario_from_dict({**SMALL, **change})


def test_presets_require_enough_trials():
    with pytest.raises(ScenarioError, match="10000"):
        preset("fig3", trials=5000)


# ---------------------------------------------------------------- running


def test_fig2_has_six_curves():
    curves = run_scenario(preset("fig2", trials=10_000))
    assert len(curves) == 6
    assert {c.label.split()[0] for c in curves} == {"instantaneous", "statistical"}
    assert all(len(c.points) == 11 and c.x_name == "P_dB" for c in curves)


def test_fig6_curves_cover_schemes_and_antennas():
    curves = run_scenario(preset("fig6", trials=10_000))
    labels = {c.label for c in curves}
    for scheme in ("uniform", "statistical", "optimal"):
        for model in ("rayleigh", "rician"):
            for n in (2, 4, 8):
                assert f"{scheme} {model} N_r={n}" in labels
    assert len(curves) == 18


def test_runs_are_bit_identical_and_thread_independent():
    s = preset("fig7", trials=10_000)
    a = format_csv(run_scenario(s, threads=1))
    b = format_csv(run_scenario(s, threads=3))
    assert a == b
    c = format_csv(run_scenario(s.replace(seed=43), threads=1))
    assert a != c


def test_common_random_numbers_give_exact_orderings():
    s = scenario_from_dict({**SMALL, "trials": 20_000})
    curves = {c.label: dict((x, sop) for x, sop, _ in c.points) for c in run_scenario(s)}
    for n in (2, 4):
        for p in (8.0, 12.0):
            for r in ("1", "2"):
                opt = curves[f"optimal N_r={n} R_s={r}"][p]
                assert opt <= curves[f"uniform N_r={n} R_s={r}"][p]
                assert opt <= curves[f"statistical N_r={n} R_s={r}"][p]
            for scheme in ("uniform", "optimal"):
                assert curves[f"{scheme} N_r={n} R_s=1"][p] <= curves[f"{scheme} N_r={n} R_s=2"][p]


def test_curve_invariants_checked():
    with pytest.raises(ScenarioError):
        SopCurve("a", "P_dB", [(2.0, 0.1, 0.0), (1.0, 0.2, 0.0)]).check()
    with pytest.raises(ScenarioError):
        SopCurve("a", "P_dB", [(1.0, 1.5, 0.0)]).check()


# ---------------------------------------------------------------- CSV


def test_csv_line_count_and_header(tmp_path):
    path = tmp_path / "out.csv"
    emit_csv([SopCurve("uniform", "P_dB", [(5.0, 0.5, 0.01), (6.0, 0.25, 0.01)], 1000)], path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert len(lines) == 3
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "uniform,P_dB,5,0.5,0.01,1000"


def test_csv_quotes_commas_and_quotes():
    text = format_csv([SopCurve('a,b "c"', "P_dB", [(1.0, 0.1, 0.0)], 1000)])
    assert text.splitlines()[1].startswith('"a,b ""c""",P_dB,')


def test_csv_nine_significant_digits_round_trip(tmp_path):
    pts = [(1 / 3, 2 / 3, 1e-7 / 3), (10.123456789123, 0.000123456789123, 0.5)]
    path = tmp_path / "r.csv"
    emit_csv([SopCurve("x", "K_sd", pts, 12345)], path)
    back = read_csv(path)[0]
    assert back.trials == 12345
    for (x, s, h), (x2, s2, h2) in zip(pts, back.points):
        assert (x2, s2, h2) == tuple(float(f"{v:.9g}") for v in (x, s, h))
    assert "0.333333333" in path.read_text()


def test_emit_to_stream_and_bad_path(tmp_path):
    buf = io.StringIO()
    emit_csv([SopCurve("x", "P_dB", [(1.0, 0.0, 0.0)], 1000)], buf)
    assert buf.getvalue().startswith("curve_label,")
    with pytest.raises(OSError, match="missing"):
        emit_csv([], tmp_path / "missing" / "out.csv")


# ---------------------------------------------------------------- CLI


def test_cli_preset_to_file(tmp_path):
    out = tmp_path / "fig3.csv"
    assert cli.main(["run", "--preset", "fig3", "--trials", "10000", "--out", str(out), "--threads", "2"]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 1 + 2 * 3 * 11


def test_cli_seed_changes_output(tmp_path):
    a, b, c = (tmp_path / f"{n}.csv" for n in "abc")
    for path, seed in ((a, "1"), (b, "1"), (c, "2")):
        assert cli.main(["run", "--preset", "fig2", "--trials", "10000", "--seed", seed, "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes() != c.read_bytes()


def test_cli_config_to_stdout(tmp_path, capsys):
    assert cli.main(["run", "--config", str(_write(tmp_path, SMALL))]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == ",".join(CSV_HEADER)
    assert len(out.splitlines()) == 1 + 3 * 2 * 2 * 2


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    assert cli.main(["run", "--config", str(_write(tmp_path, {**SMALL, "bogus": 1}))]) == 2
    assert cli.main(["run", "--config", str(_write(tmp_path, {**SMALL, "trials": 0}))]) == 2
    assert cli.main(["run", "--preset", "fig2", "--trials", "10"]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "absent.json")]) == 4
    assert cli.main(["run", "--preset", "fig2", "--trials", "10000", "--out", str(tmp_path / "no" / "x.csv")]) == 4
    with pytest.raises(SystemExit) as exc:
        cli.main(["run"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--preset", "fig9"])
    assert exc.value.code == 2

    from secsat import experiments
    from secsat.errors import ConvergenceError

    def explode(*a, **k):
        raise ConvergenceError("series did not converge")

    monkeypatch.setattr(cli, "run_scenario", explode)
    assert cli.main(["run", "--preset", "fig2"]) == 3
    assert "non-convergence" in capsys.readouterr().err
    assert experiments.run_scenario is not explode


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "secsat.cli", "run", "--preset", "fig4", "--trials", "10000"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("\n") == 1 + 6 * 11
