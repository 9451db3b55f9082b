import csv
import json

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

import pytest

from corrtrace.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from corrtrace.presets import PRESETS, load_config_text, preset_text
from corrtrace.model import ConfigError


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_parse_and_build(name):
    spec = load_config_text(preset_text(name), default_scenario=name)
    assert spec.scenario == name
    assert len(spec.variants) >= 1
    for _, cfg in spec.variants:
        assert cfg.n_steps >= 2


def test_dump_preset_round_trips(capsys):
    assert main(["run", "--dump-preset", "fig4b"]) == EXIT_OK
    text = capsys.readouterr().out
    data = tomllib.loads(text)
    assert data["scenario"] == "fig4b"
    spec = load_config_text(text)
    assert [label for label, _ in spec.variants] == ["s=0.05", "s=0.1", "s=1"]


def test_run_writes_expected_files(tmp_path):
    out = tmp_path / "out"
    rc = main(["run", "--preset", "fig2", "--grid", "301", "--out", str(out)])
    assert rc == EXIT_OK
    for name in ("dipole.csv", "distance.csv", "fig_dipole.svg", "fig_distance.svg", "manifest.json"):
        assert (out / name).exists()

    rows = _read_rows(out / "dipole.csv")
    assert rows[0] == [
        "t_scaled",
        "re_a_corr",
        "im_a_corr",
        "re_a_marg",
        "im_a_marg",
        "amp_corr",
        "phase_corr",
        "signal_corr",
        "intensity_corr",
        "amp_marg",
        "phase_marg",
        "signal_marg",
        "intensity_marg",
    ]
    assert len(rows) == 302

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "fig2"
    assert manifest["kernel_backend"] in ("cython", "numpy")
    assert manifest["variants"][0]["p0"] + manifest["variants"][0]["p1"] == pytest.approx(1.0)
    assert "timing" not in json.dumps(manifest)


def test_run_multi_coupling_layout(tmp_path):
    out = tmp_path / "multi"
    rc = main(["run", "--preset", "fig4c", "--grid", "201", "--out", str(out), "--no-svg"])
    assert rc == EXIT_OK
    for s in ("0.05", "0.1", "1"):
        assert (out / f"dipole_s{s}.csv").exists()
    assert not (out / "fig_distance.svg").exists()
    header = _read_rows(out / "distance.csv")[0]
    assert header == [
        "t_scaled",
        "trace_distance_s0.05",
        "hs_distance_s0.05",
        "trace_distance_s0.1",
        "hs_distance_s0.1",
        "trace_distance_s1",
        "hs_distance_s1",
    ]


def test_run_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--preset", "fig3", "--grid", "401", "--out", str(a)]) == EXIT_OK
    assert main(["run", "--preset", "fig3", "--grid", "401", "--out", str(b)]) == EXIT_OK
    for name in ("dipole.csv", "distance.csv", "fig_dipole.svg", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_file_run(tmp_path):
    cfg = tmp_path / "custom.toml"
    cfg.write_text(
        'scenario = "custom"\n'
        "[system]\nk_t = 2.0\n"
        '[bath]\nkind = "ohmic"\ns = 0.3\nomega_c = 0.2\n'
        "[grid]\nt_max = 20.0\nn_steps = 101\n"
    )
    out = tmp_path / "custom_out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    assert len(_read_rows(out / "dipole.csv")) == 102


def test_exit_codes(tmp_path):
    assert main(["run"]) == EXIT_CONFIG
    assert main(["run", "--preset", "nope"]) == EXIT_CONFIG
    assert main(["run", "--preset", "fig1", "--config", "x.toml"]) == EXIT_CONFIG
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == EXIT_CONFIG

    bad_key = tmp_path / "bad.toml"
    bad_key.write_text('[system]\nk_t = 1.0\nwhat = 3\n[bath]\nkind = "ohmic"\ns = 1.0\nomega_c = 0.2\n')
    assert main(["run", "--config", str(bad_key)]) == EXIT_CONFIG

    # undersampled fast-phase bath maps to the numerical exit code
    coarse = tmp_path / "coarse.toml"
    coarse.write_text(
        '[system]\nk_t = 1.0\n[bath]\nkind = "discrete"\nmodes = [[0.5, 0.4]]\n'
        "[grid]\nt_max = 100.0\nn_steps = 41\n"
    )
    assert main(["run", "--config", str(coarse), "--out", str(tmp_path / "c")]) == EXIT_NUMERICAL


def test_preset_text_unknown():
    with pytest.raises(ConfigError):
        preset_text("fig99")


def test_verify_quick(tmp_path, capsys):
    out = tmp_path / "v"
    rc = main(["verify", "--quick", "--out", str(out)])
    assert rc == EXIT_OK
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert lines and all(l.startswith("PASS") for l in lines)
    report = json.loads((out / "verify_report.json").read_text())
    assert report["checks"] and all(c["passed"] for c in report["checks"])


def test_sweep_layout(tmp_path):
    out = tmp_path / "sw"
    rc = main(["sweep", "--grid", "201", "--out", str(out)])
    assert rc == EXIT_OK
    rows = _read_rows(out / "summary.csv")
    assert rows[0][0] == "k_t" and len(rows) == 10
    for kt in ("10", "1", "0.2"):
        for s in ("0.05", "0.1", "1"):
            sub = out / f"kT{kt}_s{s}"
            assert (sub / "dipole.csv").exists()
            assert (sub / "manifest.json").exists()
    for fig in ("fig1", "fig2", "fig3", "fig4a", "fig4b", "fig4c"):
        assert (out / f"{fig}.svg").exists()
    assert (out / "manifest.json").exists()
