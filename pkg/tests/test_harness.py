import dataclasses

import pytest

from pinchsim.harness import (
    CSV_HEADER,
    FIGURES,
    ExperimentRecord,
    ExperimentSpec,
    records_to_csv,
    reproduce,
    run_experiment,
    run_oracles,
    write_columns,
)

SMALL = ExperimentSpec("siso_rate", (10.0, 40.0), trials=5, seed=42)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec("siso_rate", (10.0,), trials=0, seed=0)
    with pytest.raises(ValueError):
        ExperimentSpec("siso_rate", (), trials=1, seed=0)
    with pytest.raises(ValueError):
        ExperimentSpec("siso_rate", (40.0, 10.0), trials=1, seed=0)


def test_record_rejects_non_finite_values():
    with pytest.raises(ValueError):
        ExperimentRecord("x", 0, 1.0, "s", "m", float("inf"))


def test_unknown_experiment_rejected():
    with pytest.raises(ValueError, match="unknown experiment"):
        run_experiment(ExperimentSpec("bogus", (1.0,), trials=1, seed=0))


def test_unknown_override_rejected():
    spec = dataclasses.replace(SMALL, overrides={"bogus": 1.0})
    with pytest.raises(ValueError, match="invalid config override"):
        run_experiment(spec)


def test_run_is_deterministic_and_complete():
    a = run_experiment(SMALL)
    b = run_experiment(SMALL)
    assert a == b
    # 5 trials x 2 sweep points x 3 schemes.
    assert len(a) == 30
    assert {r.scheme for r in a} == {
        "pinch_decay_aware", "pinch_decay_agnostic", "fixed_center",
    }
    assert records_to_csv(a) == records_to_csv(b)


def test_seed_changes_records():
    a = run_experiment(SMALL)
    b = run_experiment(dataclasses.replace(SMALL, seed=43))
    assert a != b


def test_csv_shape():
    text = records_to_csv(run_experiment(SMALL))
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 31
    assert all(len(line.split(",")) == 6 for line in lines[1:])


def test_reproduce_writes_csv_and_columns(tmp_path):
    path = reproduce("siso_rate", out_dir=tmp_path, seed=1, trials=3)
    csv_text = open(path).read()
    assert csv_text.startswith(CSV_HEADER)
    cols = open(tmp_path / "siso_rate_columns.dat").read()
    # One header plus one row per sweep value.
    assert len(cols.strip().split("\n")) == 1 + len(FIGURES["siso_rate"].sweep)
    with pytest.raises(ValueError, match="unknown figure"):
        reproduce("bogus", out_dir=tmp_path)


def test_write_columns_means(tmp_path):
    records = [
        ExperimentRecord("e", 0, 1.0, "s", "m", 2.0),
        ExperimentRecord("e", 1, 1.0, "s", "m", 4.0),
    ]
    path = tmp_path / "cols.dat"
    write_columns(records, path)
    lines = open(path).read().strip().split("\n")
    assert lines[1].split() == ["1", "3"]


def test_figure_registry_covers_all_figures():
    assert set(FIGURES) == {
        "siso_rate", "noma_vs_tdma", "rate_vs_n", "sumrate_vs_power", "isac_tradeoff",
    }
    for name, spec in FIGURES.items():
        assert spec.experiment == name


def test_oracles_all_pass():
    report = run_oracles()
    assert report.passed, [c for c in report.checks if not c.passed]
    assert len(report.checks) >= 8


def test_oracles_scope_selection():
    report = run_oracles("applications")
    assert report.passed
    names = {c.name for c in report.checks}
    assert "coop_snr_ordering" in names
    with pytest.raises(ValueError, match="unknown oracle scope"):
        run_oracles("bogus")
