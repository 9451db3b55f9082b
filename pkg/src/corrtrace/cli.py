"""Command-line interface: run scenarios, sweep the figure grid, verify.

Exit codes: 0 success, 1 configuration error (bad flags, bad TOML, unknown
keys), 2 numerical failure (quadrature or grid diagnostics), 3 verification
failure.

All outputs are deterministic: CSV floats use shortest round-trip
formatting, manifests carry no timestamps or timings, and the SVG writer is
fixed-format.  Re-running a scenario reproduces every file byte for byte
(for a given kernel backend, recorded in the manifest).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, kernels
from . import svg as svgmod
from .correlations import (
    TailTooLarge,
    decoherence_exponent,
    exponent_series_ohmic,
    psi1,
    psi2,
)
from .distance import distance_series
from .dynamics import a_corr, dipole_signal, response_pair
from .model import (
    ConfigError,
    DiscreteBath,
    ModelConfig,
    OhmicBath,
    detuning,
    thermal_weights,
)
from .numerics import (
    GridTooCoarse,
    NonFinite,
    QuadratureSettings,
    ToleranceNotMet,
    integrate_semi_infinite,
)
from .presets import PRESETS, RunSpec, load_config_file, load_config_text, preset_text

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

_NUMERICAL_ERRORS = (ToleranceNotMet, NonFinite, GridTooCoarse, TailTooLarge)

# sweep axes: the three figure temperatures times the three couplings
_SWEEP_KT = (10.0, 1.0, 0.2)
_SWEEP_S = (0.05, 0.1, 1.0)


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; keep 2 reserved for
    # numerical failures by mapping usage errors to the config exit code
    def error(self, message):
        raise ConfigError(message)


def _fmt_float(v) -> str:
    return repr(float(v))


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    n = len(columns[0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(n):
            w.writerow([_fmt_float(col[i]) for col in columns])


def _settings_from_args(args) -> QuadratureSettings:
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError(f"--tol must be positive, got {args.tol}")
        return QuadratureSettings(rel_tol=args.tol)
    return QuadratureSettings()


def _apply_grid_override(spec: RunSpec, grid_n) -> RunSpec:
    if grid_n is None:
        return spec
    if grid_n < 2:
        raise ConfigError(f"--grid must be at least 2, got {grid_n}")
    variants = [
        (label, dataclasses.replace(cfg, n_steps=grid_n)) for label, cfg in spec.variants
    ]
    return RunSpec(scenario=spec.scenario, variants=variants, raw=spec.raw)


def _variant_outputs(label: str, cfg: ModelConfig, settings: QuadratureSettings) -> dict:
    ac, am = response_pair(cfg, settings=settings)
    ds = distance_series(cfg, ac, am)
    sig_c = dipole_signal(ac, cfg)
    sig_m = dipole_signal(am, cfg)
    return {
        "label": label,
        "config": cfg,
        "a_corr": ac,
        "a_marg": am,
        "distance": ds,
        "signal_corr": sig_c,
        "signal_marg": sig_m,
    }


def _dipole_columns(v: dict) -> tuple[list[str], list[np.ndarray]]:
    cfg: ModelConfig = v["config"]
    t_scaled = cfg.omega0 * v["a_corr"].t
    header = [
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
    cols = [
        t_scaled,
        v["a_corr"].values.real,
        v["a_corr"].values.imag,
        v["a_marg"].values.real,
        v["a_marg"].values.imag,
        v["signal_corr"].amplitude,
        v["signal_corr"].phase,
        v["signal_corr"].signal,
        v["signal_corr"].intensity,
        v["signal_marg"].amplitude,
        v["signal_marg"].phase,
        v["signal_marg"].signal,
        v["signal_marg"].intensity,
    ]
    return header, cols


def _variant_suffix(label: str) -> str:
    return "" if not label else "_" + label.replace("=", "")


def _variant_manifest(label: str, cfg: ModelConfig) -> dict:
    w = thermal_weights(cfg)
    out = {
        "label": label,
        "beta": cfg.beta if math.isfinite(cfg.beta) else "inf",
        "detuning": detuning(cfg),
        "p0": w.p0,
        "p1": w.p1,
    }
    if isinstance(cfg.bath, OhmicBath):
        out["bath"] = {"kind": "ohmic", "s": cfg.bath.s, "omega_c": cfg.bath.omega_c}
    else:
        out["bath"] = {"kind": "discrete", "modes": [list(m) for m in cfg.bath.modes]}
    return out


def _run_spec(
    spec: RunSpec, out_dir: Path, settings: QuadratureSettings, svg: bool
) -> tuple[dict, list[dict]]:
    """Execute a scenario and write its artifacts.

    Returns the manifest dict and the per-variant result dicts.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    results = [_variant_outputs(label, cfg, settings) for label, cfg in spec.variants]
    outputs: list[str] = []

    for v in results:
        name = f"dipole{_variant_suffix(v['label'])}.csv"
        header, cols = _dipole_columns(v)
        _write_csv(out_dir / name, header, cols)
        outputs.append(name)

    cfg0: ModelConfig = results[0]["config"]
    t_scaled = cfg0.omega0 * results[0]["distance"].t
    if len(results) == 1:
        header = ["t_scaled", "trace_distance", "hs_distance"]
        cols = [t_scaled, results[0]["distance"].trace_distance, results[0]["distance"].hs_distance]
    else:
        header = ["t_scaled"]
        cols = [t_scaled]
        for v in results:
            suffix = _variant_suffix(v["label"])
            header += [f"trace_distance{suffix}", f"hs_distance{suffix}"]
            cols += [v["distance"].trace_distance, v["distance"].hs_distance]
    _write_csv(out_dir / "distance.csv", header, cols)
    outputs.append("distance.csv")

    if svg:
        if len(results) == 1:
            v = results[0]
            chart = svgmod.line_chart(
                f"{spec.scenario}: dipole amplitude",
                "t (units of 1/omega0)",
                "eps |A(t)|",
                [
                    ("correlated", v["a_corr"].t, v["signal_corr"].amplitude),
                    ("factorized", v["a_marg"].t, v["signal_marg"].amplitude),
                ],
            )
            (out_dir / "fig_dipole.svg").write_text(chart)
            outputs.append("fig_dipole.svg")
        chart = svgmod.line_chart(
            f"{spec.scenario}: trace distance",
            "t (units of 1/omega0)",
            "D(t)",
            [
                (v["label"] or "trace distance", v["distance"].t, v["distance"].trace_distance)
                for v in results
            ],
        )
        (out_dir / "fig_distance.svg").write_text(chart)
        outputs.append("fig_distance.svg")

    manifest = {
        "package": "corrtrace",
        "version": __version__,
        "scenario": spec.scenario,
        "kernel_backend": kernels.backend_name(),
        "config": spec.raw,
        "quadrature": dataclasses.asdict(settings),
        "variants": [_variant_manifest(label, cfg) for label, cfg in spec.variants],
        "outputs": sorted(outputs + ["manifest.json"]),
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest, results


def _peak_and_stationary(v: dict) -> dict:
    d = v["distance"].trace_distance
    i = int(np.argmax(d))
    n = d.size
    tail = slice(max(0, n - max(1, n // 10)), None)
    return {
        "peak_trace_distance": float(d[i]),
        "peak_time": float(v["distance"].t[i]),
        "stationary_amp_corr": float(np.mean(v["signal_corr"].amplitude[tail])),
        "stationary_amp_marg": float(np.mean(v["signal_marg"].amplitude[tail])),
    }


def cmd_run(args) -> int:
    if args.dump_preset:
        sys.stdout.write(preset_text(args.dump_preset))
        return EXIT_OK
    if bool(args.preset) == bool(args.config):
        raise ConfigError("give exactly one of --preset or --config (or --dump-preset)")
    if args.preset:
        spec = load_config_text(preset_text(args.preset), default_scenario=args.preset)
    else:
        spec = load_config_file(args.config)
    spec = _apply_grid_override(spec, args.grid)
    settings = _settings_from_args(args)
    out_dir = Path(args.out) if args.out else Path(f"{spec.scenario}_out")
    _, results = _run_spec(spec, out_dir, settings, svg=args.svg)

    for v in results:
        stats = _peak_and_stationary(v)
        tag = f" [{v['label']}]" if v["label"] else ""
        print(
            f"{spec.scenario}{tag}: peak D = {stats['peak_trace_distance']:.4g}"
            f" at t = {stats['peak_time']:.4g}"
        )
    print(f"wrote {out_dir}/")
    return EXIT_OK


def _sweep_job(job: tuple) -> tuple[dict, dict]:
    """One (temperature, coupling) cell; runs in a worker process."""
    kt, s, out_dir_str, grid_n, tol, svg = job
    beta = math.inf if kt == 0 else 1.0 / kt
    cfg = ModelConfig(
        e0=0.0,
        e1=1.0,
        beta=beta,
        bath=OhmicBath(s=s, omega_c=0.2),
        omega_p=1.0,
        field_prefactor=0.1,
        t_max=100.0,
        n_steps=grid_n or 2001,
    )
    raw = {
        "scenario": f"kT{kt:g}_s{s:g}",
        "system": {"e0": 0.0, "e1": 1.0, "k_t": kt},
        "bath": {"kind": "ohmic", "s": s, "omega_c": 0.2},
        "probe": {"omega_p": 1.0, "field_prefactor": 0.1},
        "grid": {"t_max": 100.0, "n_steps": cfg.n_steps},
    }
    spec = RunSpec(scenario=raw["scenario"], variants=[("", cfg)], raw=raw)
    settings = QuadratureSettings(rel_tol=tol) if tol else QuadratureSettings()
    _, results = _run_spec(spec, Path(out_dir_str), settings, svg=svg)
    v = results[0]
    row = {"k_t": kt, "s": s, **_peak_and_stationary(v)}
    payload = {
        "t": v["a_corr"].t,
        "amp_corr": v["signal_corr"].amplitude,
        "amp_marg": v["signal_marg"].amplitude,
        "trace_distance": v["distance"].trace_distance,
    }
    return row, payload


def cmd_sweep(args) -> int:
    out_dir = Path(args.out) if args.out else Path("sweep_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (kt, s, str(out_dir / f"kT{kt:g}_s{s:g}"), args.grid, args.tol, args.svg)
        for kt in _SWEEP_KT
        for s in _SWEEP_S
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]

    rows = [r for r, _ in results]
    payloads = {(r["k_t"], r["s"]): p for (r, p) in results}

    with open(out_dir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "k_t",
                "s",
                "peak_trace_distance",
                "peak_time",
                "stationary_amp_corr",
                "stationary_amp_marg",
            ]
        )
        for r in rows:
            w.writerow(
                [_fmt_float(r[k]) for k in ("k_t", "s")]
                + [
                    _fmt_float(r[k])
                    for k in (
                        "peak_trace_distance",
                        "peak_time",
                        "stationary_amp_corr",
                        "stationary_amp_marg",
                    )
                ]
            )

    if args.svg:
        # amplitude figures at s = 1, one per temperature
        for name, kt in [("fig1", 10.0), ("fig2", 1.0), ("fig3", 0.2)]:
            p = payloads[(kt, 1.0)]
            chart = svgmod.line_chart(
                f"{name}: dipole amplitude, k_T = {kt:g}",
                "t (units of 1/omega0)",
                "eps |A(t)|",
                [
                    ("correlated", p["t"], p["amp_corr"]),
                    ("factorized", p["t"], p["amp_marg"]),
                ],
            )
            (out_dir / f"{name}.svg").write_text(chart)
        # witness figures: the three couplings at each temperature, t <= 60
        for name, kt in [("fig4a", 10.0), ("fig4b", 1.0), ("fig4c", 0.2)]:
            series = []
            for s in sorted(_SWEEP_S):
                p = payloads[(kt, s)]
                mask = p["t"] <= 60.0
                series.append((f"s={s:g}", p["t"][mask], p["trace_distance"][mask]))
            chart = svgmod.line_chart(
                f"{name}: trace distance, k_T = {kt:g}",
                "t (units of 1/omega0)",
                "D(t)",
                series,
            )
            (out_dir / f"{name}.svg").write_text(chart)

    manifest = {
        "package": "corrtrace",
        "version": __version__,
        "kernel_backend": kernels.backend_name(),
        "sweep": {"k_t": list(_SWEEP_KT), "s": list(_SWEEP_S)},
        "subdirectories": [f"kT{kt:g}_s{s:g}" for kt in _SWEEP_KT for s in _SWEEP_S],
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"sweep: wrote {out_dir}/ ({len(rows)} cells)")
    return EXIT_OK


def _verify_checks(quick: bool, full: bool) -> list[dict]:
    checks: list[dict] = []

    def record(name: str, metric: float, threshold: float, detail: str = "") -> None:
        checks.append(
            {
                "name": name,
                "passed": bool(metric < threshold),
                "metric": float(metric),
                "threshold": float(threshold),
                "detail": detail,
            }
        )

    omega_c = 0.2
    ts = np.linspace(0.0, 100.0, 11 if quick else 41)[1:]

    # closed forms vs quadrature, both parts of the exponent
    worst = 0.0
    for s in (0.05, 0.1, 1.0):
        bath = OhmicBath(s=s, omega_c=omega_c)
        for t in ts:
            g = decoherence_exponent(bath, math.inf, float(t))
            worst = max(worst, abs(g.real - 0.5 * s * math.log1p((omega_c * t) ** 2)))

            def f_im(omega, t=t, s=s):
                return s * np.exp(-omega / omega_c) * np.sin(omega * t) / omega

            im = integrate_semi_infinite(
                f_im, decay_scale=omega_c, osc_period=2.0 * math.pi / float(t)
            )
            worst = max(worst, abs(im - s * math.atan(omega_c * t)))
    record("closed_forms", worst, 1e-8, "max abs err, T=0 Re and sine-integral Im")

    # image-sum route vs quadrature route
    worst = 0.0
    for beta in (0.1, 1.0, 5.0):
        for t in (0.5, 1.0, 5.0, 10.0, 50.0, 100.0):
            gq = decoherence_exponent(OhmicBath(s=1.0, omega_c=omega_c), beta, t)
            gs = exponent_series_ohmic(1.0, omega_c, beta, t)
            worst = max(worst, abs(gq - gs) / abs(gs))
    record("series_agreement", worst, 1e-7, "max rel err, beta in {0.1, 1, 5}")

    # degeneracy: uncoupled bath
    cfg0 = ModelConfig(
        e0=0.0,
        e1=1.0,
        beta=0.7,
        bath=OhmicBath(s=0.0, omega_c=omega_c),
        omega_p=0.9,
        t_max=50.0,
        n_steps=501,
    )
    ac, am = response_pair(cfg0)
    ds = distance_series(cfg0, ac, am)
    worst = max(
        float(np.max(np.abs(ac.values - am.values))),
        float(np.max(ds.trace_distance)),
        abs(psi1(cfg0.bath, cfg0.beta, 3.0) - 1.0),
        abs(psi2(cfg0.bath, cfg0.beta, 5.0, 2.0) - 1.0),
    )
    record("degeneracy_uncoupled", worst, 1e-12, "s=0: responses equal, D=0, Psi=1")

    # degeneracy: infinite temperature at zero detuning
    bath_d = DiscreteBath(modes=((0.3, 0.8),))
    cfg_b0 = ModelConfig(
        e0=0.0,
        e1=1.0 + bath_d.polaron_shift(),
        beta=0.0,
        bath=bath_d,
        omega_p=1.0,
        t_max=20.0,
        n_steps=201,
    )
    worst = float(np.max(np.abs(a_corr(cfg_b0).values)))
    record("degeneracy_infinite_t", worst, 1e-12, "beta=0, dw=0: A_corr = 0")

    # two-time envelope invariants
    bath1 = OhmicBath(s=1.0, omega_c=omega_c)
    worst = 0.0
    for t, tp in ((3.0, 3.0), (7.0, 2.0), (20.0, 19.0)):
        p2 = psi2(bath1, 1.0, t, tp)
        if t == tp:
            worst = max(worst, abs(p2 - 1.0))
        worst = max(worst, abs(abs(p2) - abs(psi1(bath1, 1.0, t - tp))))
    record("two_time_envelope", worst, 1e-10, "Psi2(t,t)=1 and |Psi2|=|Psi1|")

    if not quick:
        from . import oracle as orc

        def oracle_check(modes, n_max, label):
            bath = DiscreteBath(modes=modes)
            cfg = ModelConfig(
                e0=0.0, e1=1.0, beta=1.0, bath=bath, omega_p=1.0, t_max=10.0, n_steps=201
            )
            t = cfg.time_grid()
            system = orc.build_system(bath, n_max=n_max)
            rho_g = orc.gibbs_state(system, cfg.beta)
            rho_m = orc.marginal_state(rho_g)
            ac, am = response_pair(cfg)
            scale = float(np.max(np.abs(ac.values)))
            ec = np.max(
                np.abs(ac.values - orc.first_order_coherence(system, rho_g, 1.0, t).values)
            )
            em = np.max(
                np.abs(am.values - orc.first_order_coherence(system, rho_m, 1.0, t).values)
            )
            record(label, max(ec, em) / scale, 1e-3, f"n_max={n_max}")

        oracle_check(((0.3, 0.8),), 18, "oracle_one_mode")
        if full:
            oracle_check(((0.25, 0.8), (0.15, 1.3)), 18, "oracle_two_modes")

    return checks


def cmd_verify(args) -> int:
    checks = _verify_checks(quick=args.quick, full=args.full)
    out_dir = Path(args.out) if args.out else Path("verify_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "verify_report.json", "w") as fh:
        json.dump({"version": __version__, "checks": checks}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    ok = True
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        ok = ok and c["passed"]
        print(
            f"{status} {c['name']}: metric={c['metric']:.3e}"
            f" threshold={c['threshold']:.0e} ({c['detail']})"
        )
    print(f"report: {out_dir / 'verify_report.json'}")
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="corrtrace", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"corrtrace {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and write its artifacts")
    run.add_argument("--preset", choices=sorted(PRESETS), help="embedded scenario")
    run.add_argument("--config", help="TOML config file")
    run.add_argument("--dump-preset", choices=sorted(PRESETS), help="print a preset config and exit")
    run.add_argument("--out", help="output directory (default <scenario>_out)")
    run.add_argument("--tol", type=float, help="quadrature relative tolerance")
    run.add_argument("--grid", type=int, help="override the number of grid points")
    run.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run the temperature-coupling grid and figures")
    sweep.add_argument("--out", help="output directory (default sweep_out)")
    sweep.add_argument("--workers", type=int, default=1, help="parallel processes")
    sweep.add_argument("--tol", type=float, help="quadrature relative tolerance")
    sweep.add_argument("--grid", type=int, help="override the number of grid points")
    sweep.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True)
    sweep.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="run built-in correctness checks")
    ver.add_argument("--quick", action="store_true", help="fewer points, skip the oracle")
    ver.add_argument("--full", action="store_true", help="include the two-mode oracle check")
    ver.add_argument("--out", help="report directory (default verify_out)")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
