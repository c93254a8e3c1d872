"""Command-line interface: parsing, schema, determinism, exit codes."""
import csv
import json
import math

import pytest

from phonent.cli import (
    BASE_COLUMNS,
    METHODS,
    SweepConfig,
    _axis_values,
    build_presets,
    emit_manifest,
    main,
    run_point,
    run_sweep,
)
from phonent.model import InputError


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestPointCommand:
    def test_json_document(self, capsys):
        rc = main(["point", "--c1", "10", "--c2", "2", "--methods", "exact"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema_version"] == "1"
        assert doc["channel"] == "perfect"
        assert doc["params"] == {"c1": 10.0, "c2": 2.0, "mu": 1.0, "q": 0,
                                 "eps_trunc": 1e-12}
        z = 80.0 / 169.0
        want = math.log((1.0 + math.sqrt(z)) / (1.0 - math.sqrt(z)))
        assert doc["values"]["e_perfect"] == pytest.approx(want, abs=1e-10)
        assert doc["occupations"]["zeta"] == pytest.approx(z, rel=1e-14)

    def test_onoff_point_reports_on_channel(self, capsys):
        rc = main(["point", "--c1", "100", "--c2", "5",
                   "--methods", "onoff-numeric"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["channel"] == "on"
        assert doc["values"]["e_off"] > 0.0

    def test_csv_single_row(self, capsys):
        rc = main(["point", "--c1", "10", "--c2", "2", "--format", "csv"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == ",".join(BASE_COLUMNS)
        assert len(lines) == 2

    def test_no_bath_gives_zero(self, capsys):
        main(["point", "--c1", "10", "--c2", "0"])
        doc = json.loads(capsys.readouterr().out)
        assert doc["values"]["e_perfect"] == 0.0

    def test_unstable_input_exits_2(self, capsys):
        rc = main(["point", "--c1", "5", "--c2", "6"])
        assert rc == 2
        err = capsys.readouterr().err
        assert "stability violated" in err
        assert "at q=" not in err  # single points carry no axis context

    def test_unknown_method_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["point", "--c1", "10", "--c2", "2", "--methods", "parity"])
        assert exc.value.code == 2


class TestSweepCommand:
    ARGS = ["sweep", "--c1", "10", "--c2", "2", "--axis", "q",
            "--start", "0", "--stop", "5", "--step", "1",
            "--methods", "exact,gaussian"]

    def test_csv_schema_and_order(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(self.ARGS + ["--out", str(out)]) == 0
        rows = read_csv(out)
        assert list(rows[0].keys()) == list(BASE_COLUMNS)
        assert [r["axis"] for r in rows] == [str(i) for i in range(6)]
        values = [float(r["e_perfect"]) for r in rows]
        assert all(b > a for a, b in zip(values, values[1:]))
        # methods not requested leave their columns empty
        assert rows[0]["e_pert1"] == ""

    def test_reruns_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(self.ARGS + ["--out", str(a)])
        main(self.ARGS + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_threaded_run_matches(self, tmp_path, monkeypatch):
        a, b = tmp_path / "serial.csv", tmp_path / "pooled.csv"
        main(self.ARGS + ["--out", str(a)])
        monkeypatch.setenv("PHONENT_THREADS", "4")
        main(self.ARGS + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_thread_count_exits_2(self, monkeypatch, capsys):
        monkeypatch.setenv("PHONENT_THREADS", "many")
        assert main(self.ARGS) == 2
        assert "PHONENT_THREADS" in capsys.readouterr().err

    def test_mu_axis_cells_are_decimal(self, tmp_path):
        out = tmp_path / "mu.csv"
        rc = main(["sweep", "--c1", "10", "--c2", "2", "--q", "2",
                   "--axis", "mu", "--start", "0.9", "--stop", "1.0",
                   "--step", "0.05", "--methods", "eigensolve",
                   "--out", str(out)])
        assert rc == 0
        assert [r["axis"] for r in read_csv(out)] == ["0.9", "0.95", "1.0"]

    def test_c2_axis_reports_failing_point(self, capsys):
        rc = main(["sweep", "--c1", "5", "--c2", "1", "--axis", "c2",
                   "--start", "1", "--stop", "8", "--step", "1",
                   "--methods", "exact"])
        assert rc == 2
        err = capsys.readouterr().err
        assert "at c2=6" in err and "stability violated" in err

    def test_tighter_truncation_flows_through(self, tmp_path):
        out = tmp_path / "tight.csv"
        main(self.ARGS + ["--eps-trunc", "1e-10", "--out", str(out)])
        worst = max(float(r["trunc_deficit"]) for r in read_csv(out))
        assert worst < 1e-10

    def test_json_format(self, capsys):
        rc = main(self.ARGS[:-2] + ["--methods", "exact", "--format", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["columns"] == list(BASE_COLUMNS)
        assert doc["preset"] is None
        assert len(doc["rows"]) == 6


class TestManifest:
    def test_document(self, capsys):
        assert main(["manifest"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema_version"] == "1"
        assert doc["columns"] == list(BASE_COLUMNS)
        assert sorted(doc["presets"]) == ["fig2", "fig3", "fig4", "fig5"]
        fig2 = doc["presets"]["fig2"]
        assert fig2["params"]["c1"] == 10.0
        assert fig2["params"]["c2"] == 2.0
        assert fig2["axis"] == {"name": "q", "start": 0, "stop": 30,
                                "count": 31}
        counts = {k: v["curve_count"] for k, v in doc["presets"].items()}
        assert counts == {"fig2": 5, "fig3": 7, "fig4": 9, "fig5": 3}

    def test_curve_columns_exist_in_schema(self):
        for name, entry in emit_manifest()["presets"].items():
            for col in entry["curve_columns"]:
                assert col in entry["columns"], (name, col)


class TestConfigValidation:
    def test_rejects_unknown_axis(self):
        with pytest.raises(InputError, match="unknown axis"):
            SweepConfig(c1=10, c2=2, axis="c1", values=(1.0,))

    def test_rejects_empty_values(self):
        with pytest.raises(InputError, match="at least one"):
            SweepConfig(c1=10, c2=2, values=())

    def test_rejects_no_methods(self):
        with pytest.raises(InputError, match="no methods"):
            SweepConfig(c1=10, c2=2, values=(0,), methods=())

    def test_rejects_unknown_method(self):
        with pytest.raises(InputError, match="unknown method"):
            SweepConfig(c1=10, c2=2, values=(0,), methods=("exact", "magic"))

    def test_method_table_covers_all(self):
        cfg = SweepConfig(c1=10, c2=2, values=(0,), methods=METHODS)
        assert set(BASE_COLUMNS) > {"axis", "prob"}
        assert cfg.resolved_prob_kind() == "imperfect"


class TestAxisValues:
    def test_q_range(self):
        assert _axis_values("q", 0, 10, 2) == (0, 2, 4, 6, 8, 10)

    def test_q_rejects_fractional(self):
        with pytest.raises(InputError, match="integer"):
            _axis_values("q", 0.5, 10, 1)

    def test_rejects_bad_step(self):
        with pytest.raises(InputError, match="step"):
            _axis_values("mu", 0.5, 1.0, 0.0)

    def test_rejects_reversed_range(self):
        with pytest.raises(InputError, match="stop < start"):
            _axis_values("mu", 1.0, 0.5, 0.1)

    def test_decimal_grid_is_exact(self):
        vals = _axis_values("mu", 0.5, 0.6, 0.01)
        assert len(vals) == 11
        assert repr(vals[3]) == "0.53"


class TestRunHelpers:
    def test_run_point_document(self):
        doc = run_point(10.0, 2.0, 0.9, 2, ("eigensolve", "pert1"))
        assert doc["channel"] == "imperfect"
        assert set(doc["values"]) == {"e_pre", "e_imperfect_numeric", "e_pert1"}

    def test_run_sweep_rows_in_order(self):
        cfg = SweepConfig(c1=10, c2=2, values=(0, 1, 2), methods=("exact",))
        rows = run_sweep(cfg)
        assert [r.axis_value for r in rows] == [0, 1, 2]
        assert all(r.values["e_pre"] == rows[0].values["e_pre"] for r in rows)

    def test_presets_are_well_formed(self):
        for name, preset in build_presets().items():
            cols = preset.config.columns()
            for col in preset.curve_columns:
                assert col in cols, (name, col)
