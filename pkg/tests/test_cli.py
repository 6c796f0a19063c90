import json

import pytest

from pinchsim.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _as_dict(out):
    return dict(line.split("=", 1) for line in out.strip().split("\n"))


def test_place_siso(capsys):
    code, out, _ = _run(capsys, "place-siso", "--user", "30,4")
    assert code == 0
    vals = _as_dict(out)
    assert float(vals["x_star"]) < 30.0
    assert float(vals["rate"]) > 0.0


def test_tdma(capsys):
    code, out, _ = _run(capsys, "tdma", "--users", "5,2;20,-3;40,6")
    assert code == 0
    vals = _as_dict(out)
    assert float(vals["x_star"]) == pytest.approx((5 + 20 + 40) / 3)
    assert sum(float(vals[f"power_{i}"]) for i in range(3)) == pytest.approx(1.0)


def test_noma2(capsys):
    code, out, _ = _run(capsys, "noma2", "--primary", "10,8", "--secondary", "30,-2")
    assert code == 0
    vals = _as_dict(out)
    assert float(vals["alpha_p"]) + float(vals["alpha_s"]) == pytest.approx(1.0)


def test_array(capsys):
    code, out, _ = _run(capsys, "array", "--users", "5,2;20,-3", "--n", "3")
    assert code == 0
    vals = _as_dict(out)
    assert float(vals["min_rate"]) > 0.0
    assert sum(float(vals[f"t_{i}"]) for i in range(2)) == pytest.approx(1.0)


def test_coop(capsys):
    code, out, _ = _run(
        capsys, "coop", "--nb", "4", "--p", "4", "--n", "8",
        "--lb", "100", "--lg", "10", "--gamma-t", "1e9",
    )
    assert code == 0
    vals = _as_dict(out)
    assert float(vals["FCD"]) >= float(vals["SCD"]) >= float(vals["SD"])
    assert vals["best"] == "FCD"


def test_out_file(capsys, tmp_path):
    path = tmp_path / "out.txt"
    code, out, _ = _run(capsys, "place-siso", "--user", "10,0", "--out", str(path))
    assert code == 0
    assert out == ""
    assert "x_star=" in path.read_text()


def test_global_flags_work_before_subcommand(capsys, tmp_path):
    path = tmp_path / "out.txt"
    code, _, _ = _run(capsys, "--out", str(path), "place-siso", "--user", "10,0")
    assert code == 0
    assert "x_star=" in path.read_text()


def test_reproduce_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    for d in (a, b):
        code, out, _ = _run(
            capsys, "reproduce", "siso_rate", "--trials", "3", "--seed", "5",
            "--out-dir", str(d),
        )
        assert code == 0
        assert out.startswith("csv=")
    assert (a / "siso_rate.csv").read_bytes() == (b / "siso_rate.csv").read_bytes()


def test_oracles_scope(capsys):
    code, out, _ = _run(capsys, "oracles", "--scope", "applications")
    assert code == 0
    assert out.startswith("PASS")


def test_error_line_is_machine_readable(capsys):
    code, _, err = _run(capsys, "place-siso", "--user", "not-a-point")
    assert code != 0
    line = err.strip().split("\n")[-1]
    assert line.startswith("error=")
    payload = json.loads(line[len("error="):])
    assert "message" in payload


def test_infeasible_exits_nonzero(capsys):
    code, _, err = _run(
        capsys, "isac", "--user", "3,2", "--target", "7,-1", "--floor", "1e6",
    )
    assert code != 0
    assert err.startswith("error=")


def test_config_env_override(capsys, monkeypatch):
    monkeypatch.setenv("PINCHSIM_P_MAX", "20 dBm")
    _, out_low, _ = _run(capsys, "place-siso", "--user", "30,4")
    monkeypatch.setenv("PINCHSIM_P_MAX", "40 dBm")
    _, out_high, _ = _run(capsys, "place-siso", "--user", "30,4")
    assert float(_as_dict(out_high)["snr"]) > float(_as_dict(out_low)["snr"])


def test_config_file(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("PINCHSIM_P_MAX", raising=False)
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('p_max = "40 dBm"\n')
    _, out_file, _ = _run(
        capsys, "place-siso", "--user", "30,4", "--config", str(cfg)
    )
    _, out_default, _ = _run(capsys, "place-siso", "--user", "30,4")
    assert float(_as_dict(out_file)["snr"]) > float(_as_dict(out_default)["snr"])
