"""Embedded scenario presets and the TOML config loader.

Presets are stored as literal TOML and parsed through the same loader as
user config files, so `--dump-preset` emits exactly what the run consumes.

Schema (all tables required unless noted):

    scenario = "name"            # optional, defaults to preset name/file stem
    [system]
    e0 = 0.0
    e1 = 1.0
    k_t = 10.0                   # temperature k_B T; or beta = ... (one of them)
    [bath]
    kind = "ohmic"               # or "discrete"
    s = 1.0                      # ohmic; or s_values = [...] for a multi-coupling run
    omega_c = 0.2
    # modes = [[g, omega], ...]  # discrete
    [probe]                      # optional
    omega_p = 1.0
    field_prefactor = 0.1
    [grid]                       # optional
    t_max = 100.0
    n_steps = 2001

Temperatures and energies are in units of the qubit gap (hbar = k_B = 1).
Unknown keys are rejected rather than ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .model import ConfigError, ModelConfig, beta_from_temperature, make_bath

__all__ = ["PRESETS", "RunSpec", "load_config_text", "load_config_file", "preset_text"]

_COMMON_OHMIC = """\
[system]
e0 = 0.0
e1 = 1.0
k_t = {k_t}

[bath]
kind = "ohmic"
{coupling}
omega_c = 0.2

[probe]
omega_p = 1.0
field_prefactor = 0.1

[grid]
t_max = {t_max}
n_steps = {n_steps}
"""


def _ohmic_preset(name: str, k_t: float, coupling: str, t_max: float, n_steps: int) -> str:
    return f'scenario = "{name}"\n' + _COMMON_OHMIC.format(
        k_t=k_t, coupling=coupling, t_max=t_max, n_steps=n_steps
    )


# figN presets: the three temperatures at s = 1 on the long grid, and the
# three multi-coupling witness panels on the shorter one.
PRESETS: dict[str, str] = {
    "fig1": _ohmic_preset("fig1", 10.0, "s = 1.0", 100.0, 2001),
    "fig2": _ohmic_preset("fig2", 1.0, "s = 1.0", 100.0, 2001),
    "fig3": _ohmic_preset("fig3", 0.2, "s = 1.0", 100.0, 2001),
    "fig4a": _ohmic_preset("fig4a", 10.0, "s_values = [0.05, 0.1, 1.0]", 60.0, 1201),
    "fig4b": _ohmic_preset("fig4b", 1.0, "s_values = [0.05, 0.1, 1.0]", 60.0, 1201),
    "fig4c": _ohmic_preset("fig4c", 0.2, "s_values = [0.05, 0.1, 1.0]", 60.0, 1201),
}


@dataclass
class RunSpec:
    """A parsed scenario: one or more model configs sharing everything but s."""

    scenario: str
    variants: list[tuple[str, ModelConfig]]  # (label, config); label "" if single
    raw: dict


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


_SCHEMA = {
    "scenario": None,
    "system": {"e0", "e1", "k_t", "beta"},
    "bath": {"kind", "s", "s_values", "omega_c", "modes"},
    "probe": {"omega_p", "field_prefactor"},
    "grid": {"t_max", "n_steps"},
}


def _check_keys(data: dict) -> None:
    for key, sub in data.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        allowed = _SCHEMA[key]
        if allowed is None:
            continue
        if not isinstance(sub, dict):
            raise ConfigError(f"config section [{key}] must be a table")
        for k in sub:
            if k not in allowed:
                raise ConfigError(f"unknown config key {key}.{k}")


def _number(table: dict, section: str, key: str, default=None) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"missing config key {section}.{key}")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {v!r}")
    return float(v)


def load_config_dict(data: dict, default_scenario: str = "run") -> RunSpec:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table")
    _check_keys(data)
    scenario = data.get("scenario", default_scenario)
    if not isinstance(scenario, str) or not scenario:
        raise ConfigError("scenario must be a non-empty string")

    system = data.get("system")
    if not isinstance(system, dict):
        raise ConfigError("missing [system] table")
    e0 = _number(system, "system", "e0", 0.0)
    e1 = _number(system, "system", "e1", 1.0)
    has_kt = "k_t" in system
    has_beta = "beta" in system
    if has_kt == has_beta:
        raise ConfigError("give exactly one of system.k_t or system.beta")
    if has_kt:
        beta = beta_from_temperature(_number(system, "system", "k_t"))
    else:
        beta = _number(system, "system", "beta")

    bath_tab = data.get("bath")
    if not isinstance(bath_tab, dict):
        raise ConfigError("missing [bath] table")
    kind = bath_tab.get("kind")
    if kind not in ("ohmic", "discrete"):
        raise ConfigError(f"bath.kind must be 'ohmic' or 'discrete', got {kind!r}")

    probe = data.get("probe", {})
    omega_p = _number(probe, "probe", "omega_p", 1.0)
    field_prefactor = _number(probe, "probe", "field_prefactor", 0.1)
    grid = data.get("grid", {})
    t_max = _number(grid, "grid", "t_max", 100.0)
    n_steps = grid.get("n_steps", 2001)
    if isinstance(n_steps, bool) or not isinstance(n_steps, int):
        raise ConfigError(f"grid.n_steps must be an integer, got {n_steps!r}")

    def build(bath) -> ModelConfig:
        return ModelConfig(
            e0=e0,
            e1=e1,
            beta=beta,
            bath=bath,
            omega_p=omega_p,
            field_prefactor=field_prefactor,
            t_max=t_max,
            n_steps=n_steps,
        )

    variants: list[tuple[str, ModelConfig]]
    if kind == "ohmic":
        omega_c = _number(bath_tab, "bath", "omega_c")
        has_s = "s" in bath_tab
        has_sv = "s_values" in bath_tab
        if has_s == has_sv:
            raise ConfigError("give exactly one of bath.s or bath.s_values")
        if has_s:
            s = _number(bath_tab, "bath", "s")
            variants = [("", build(make_bath("ohmic", s=s, omega_c=omega_c)))]
        else:
            sv = bath_tab["s_values"]
            if not isinstance(sv, list) or not sv:
                raise ConfigError("bath.s_values must be a non-empty array")
            variants = []
            for s in sv:
                if isinstance(s, bool) or not isinstance(s, (int, float)):
                    raise ConfigError(f"bath.s_values entries must be numbers, got {s!r}")
                variants.append(
                    (f"s={float(s):g}", build(make_bath("ohmic", s=float(s), omega_c=omega_c)))
                )
    else:
        modes = bath_tab.get("modes")
        if modes is None:
            raise ConfigError("discrete bath needs bath.modes = [[g, omega], ...]")
        variants = [("", build(make_bath("discrete", modes=modes)))]

    return RunSpec(scenario=scenario, variants=variants, raw=data)


def load_config_text(text: str, default_scenario: str = "run") -> RunSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    return load_config_dict(data, default_scenario)


def load_config_file(path: str) -> RunSpec:
    import pathlib

    p = pathlib.Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return load_config_text(text, default_scenario=p.stem)
