import csv
import json

import pytest

from duopoly.main import load_run_config, main
from duopoly.models.game import UncertaintySet
from duopoly.services.profit_service import profit_series
from duopoly.utils.errors import ConfigInvalid


def _read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


def test_analyze_fig6(tmp_path, capsys):
    assert main(["analyze", "--preset", "fig6", "--output-dir", str(tmp_path)]) == 0
    printed = json.loads(capsys.readouterr().out)
    saved = json.loads((tmp_path / "analyze.json").read_text())
    assert printed == saved
    assert saved["regime"]["case"] == "IIIc"
    assert saved["regime"]["k"] == 1
    assert len(saved["chaotic_intervals"]["intervals"]) == 2
    assert saved["lyapunov"] > 0


def test_analyze_regime_i_reports_infinite_exponent(tmp_path, capsys):
    assert main(["analyze", "--preset", "fig1a", "--output-dir", str(tmp_path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["regime"]["case"] == "I"
    assert report["lyapunov"] == "-inf"
    assert report["chaotic_intervals"] is None


def test_simulate_1d(tmp_path):
    assert main(["simulate", "--preset", "fig6", "--n", "10", "--output-dir", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "simulate.csv")
    assert rows[0] == ["orbit", "t", "x"]
    assert len(rows) == 11
    assert [r[1] for r in rows[1:]] == [str(t) for t in range(1, 11)]
    # f(1.9) = 1.25 * 1.9
    assert float(rows[1][2]) == pytest.approx(2.375)


def test_simulate_random_starts_are_reproducible(tmp_path):
    args = ["simulate", "--preset", "fig6", "--mode", "2d", "--random-ic", "3", "--seed", "5", "--n", "20"]
    assert main(args + ["--output-dir", str(tmp_path / "one")]) == 0
    assert main(args + ["--output-dir", str(tmp_path / "two")]) == 0
    first = (tmp_path / "one" / "simulate.csv").read_bytes()
    assert first == (tmp_path / "two" / "simulate.csv").read_bytes()

    rows = _read_csv(tmp_path / "one" / "simulate.csv")
    assert rows[0] == ["orbit", "t", "x", "y"]
    assert {r[0] for r in rows[1:]} == {"0", "1", "2"}


def test_simulate_mixed(tmp_path):
    assert main(["simulate", "--preset", "fig5", "--mode", "mixed", "--n", "5", "--output", "mixed",
                 "--output-dir", str(tmp_path)]) == 0
    assert len(_read_csv(tmp_path / "mixed.csv")) == 6


def test_cycles_fig6(tmp_path):
    assert main(["cycles", "--preset", "fig6", "--output-dir", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "cycles.csv")
    assert rows[0][:3] == ["cycle", "origin", "period"]
    origins = {r[1] for r in rows[1:]}
    assert origins == {"diagonal", "singly", "doubly"}


def test_bifurcate_fig2(tmp_path):
    assert main(["bifurcate-1d", "--preset", "fig2", "--steps", "5", "--samples", "10", "--burn", "200",
                 "--output-dir", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "bifurcate_1d.csv")
    assert rows[0] == ["b_lo", "x"]
    assert len(rows) == 1 + 5 * 10


def test_regime_map_outputs(tmp_path):
    assert main(["regime-map", "--preset", "fig8a", "--nx", "20", "--ny", "20",
                 "--output-dir", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "regime_map.csv")
    assert rows[0] == ["i", "j", "g_hi", "b_hi", "tag"]
    assert len(rows) == 401
    assert {r[4] for r in rows[1:]} <= {"I", "II", "IIIa", "IIIb", "chaotic", "out-of-domain"}

    image = (tmp_path / "regime_map.ppm").read_bytes()
    header = b"P6\n20 20\n255\n"
    assert image.startswith(header)
    assert len(image) == len(header) + 20 * 20 * 3
    assert (tmp_path / "regime_map_curves.csv").exists()


def test_basins_outputs(tmp_path):
    assert main(["basins", "--preset", "fig6", "--grid", "20", "--burn", "200", "--n-tail", "100",
                 "--output-dir", str(tmp_path)]) == 0
    assert len(_read_csv(tmp_path / "basins.csv")) == 401
    assert (tmp_path / "basins.ppm").read_bytes().startswith(b"P6\n20 20\n255\n")
    summary = json.loads((tmp_path / "basins_symmetry.json").read_text())
    assert len(summary["catalog"]) == 3
    assert summary["symmetry"]["fraction"] == 1.0


def test_basins_custom_window(tmp_path):
    assert main(["basins", "--preset", "fig6", "--grid", "10", "--window", "1.8", "2.6", "--burn", "100",
                 "--n-tail", "50", "--output-dir", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "basins.csv")
    assert float(rows[1][2]) == pytest.approx(1.84)


def test_profits_round_trip(tmp_path):
    assert main(["profits", "--preset", "fig3", "--n", "20", "--output-dir", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "profits.csv")
    assert rows[0][0] == "t"
    expected = profit_series(UncertaintySet(b_hi=0.6, b_lo=0.15, g_hi=0.5, g_lo=0.0), 1.0, 20, 1000)
    assert [float(r[2]) for r in rows[1:]] == expected.realized
    assert [int(r[0]) for r in rows[1:]] == expected.t


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("DUOPOLY_OUTPUT_DIR", str(tmp_path))
    assert main(["profits", "--preset", "fig3", "--n", "3"]) == 0
    assert (tmp_path / "profits.csv").exists()


def test_flags_override_config_file(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"preset": "fig6", "n": 7}))
    assert main(["simulate", "--config", str(config), "--n", "4", "--output-dir", str(tmp_path)]) == 0
    assert len(_read_csv(tmp_path / "simulate.csv")) == 5


def test_config_precedence():
    config = load_run_config({"command": "simulate", "preset": "fig5", "b_lo": 0.05})
    assert (config.b_hi, config.b_lo, config.g_hi) == (0.33, 0.05, 0.3)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigInvalid):
        load_run_config({"command": "analyze", "colour": "red"})


@pytest.mark.parametrize("args, code, name", [
    (["analyze", "--b-hi", "0.2", "--b-lo", "0.3"], 10, "OrderingViolation"),
    (["analyze", "--a", "0"], 11, "NonPositiveChoke"),
    (["analyze", "--b-hi", "0.3", "--b-lo", "0.3", "--g-hi", "0.3", "--g-lo", "0.3"], 12, "SingletonSet"),
    (["analyze", "--b-hi", "0.3", "--b-lo", "0.3", "--g-hi", "0.3", "--g-lo", "0"], 13, "DegenerateMap"),
    (["analyze", "--preset", "nope"], 3, "ConfigInvalid"),
    (["regime-map", "--g-hi-range", "1", "0"], 3, "ConfigInvalid"),
    (["bifurcate-1d", "--preset", "fig2", "--param", "g_lo", "--lo", "0.3", "--hi", "0.4", "--steps", "3"],
     27, "EmptySweep"),
])
def test_exit_codes(tmp_path, capsys, args, code, name):
    assert main(args + ["--output-dir", str(tmp_path)]) == code
    assert capsys.readouterr().err.startswith(f"error {name}:")


def test_unwritable_output_dir(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["profits", "--preset", "fig3", "--n", "3", "--output-dir", str(blocker / "sub")]) == 30
    assert "IoFailure" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["analyze", "--config", str(tmp_path / "missing.json")]) == 30


def test_bad_command_is_a_usage_error():
    with pytest.raises(SystemExit):
        main(["explode"])
