"""Experiment configuration: INI-style sections of key = value pairs.

Grammar: standard configparser syntax.  Unknown sections or keys are
rejected so typos fail loudly, and every physical default is visible via
``default_config_text()`` (the CLI exposes it as --print-defaults).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from prlab.integrators import TOL_RANGE


class ConfigError(ValueError):
    """Bad experiment configuration (parse error or illegal value)."""


@dataclass(frozen=True)
class ExperimentConfig:
    # [torus]
    n: int = 2
    vector: str = "sqrt-primes"  # or comma-separated floats, length 2(n-1)
    # [profiles]
    profile_id: str = "sin"
    profile_params: tuple[float, ...] = ()
    # [base]
    base_id: str = "constant"
    base_params: tuple[float, ...] = (1.0,)
    # [integrate]
    tol: float = 1e-10
    # [campaign]
    ks: tuple[int, ...] = (1, 2, 3)
    theta_grid: int = 32
    samples_per_theta: int = 8
    fixed_points: int = 8
    slice_points: int = 16
    slice_k: int = 6
    seed: int = 20240831
    # [persistence]
    barcode_grid: int = 1024
    # [entropy]
    entropy_epsilon: float = 0.02
    entropy_n_max: int = 8
    entropy_grid_side: int = 24
    entropy_box_side: float = 0.04
    lyapunov_window: int = 150
    lyapunov_seeds: int = 16
    # [output]
    out_dir: str = "prlab-out"
    formats: tuple[str, ...] = ("json",)

    def validate(self) -> "ExperimentConfig":
        if self.n < 2:
            raise ConfigError(f"torus half-dimension n must be >= 2, got {self.n}")
        if not (TOL_RANGE[0] <= self.tol <= TOL_RANGE[1]):
            raise ConfigError(f"tol {self.tol} outside {TOL_RANGE}")
        if any(k < 1 for k in self.ks) or not self.ks:
            raise ConfigError(f"iterate list must be positive integers, got {self.ks}")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must fit in a u64")
        if self.theta_grid < 4:
            raise ConfigError("theta grid too small")
        for fmt in self.formats:
            if fmt not in ("json", "csv", "svg"):
                raise ConfigError(f"unknown output format {fmt!r}")
        if not (0.0 < self.entropy_epsilon < 0.25):
            raise ConfigError("entropy epsilon must lie in (0, 0.25)")
        return self

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw).validate()


_SECTIONS = {
    "torus": {"n": ("n", int), "vector": ("vector", str)},
    "profiles": {
        "id": ("profile_id", str),
        "params": ("profile_params", "floats"),
    },
    "base": {"id": ("base_id", str), "params": ("base_params", "floats")},
    "integrate": {"tol": ("tol", float)},
    "campaign": {
        "ks": ("ks", "ints"),
        "theta_grid": ("theta_grid", int),
        "samples_per_theta": ("samples_per_theta", int),
        "fixed_points": ("fixed_points", int),
        "slice_points": ("slice_points", int),
        "slice_k": ("slice_k", int),
        "seed": ("seed", int),
    },
    "persistence": {"barcode_grid": ("barcode_grid", int)},
    "entropy": {
        "epsilon": ("entropy_epsilon", float),
        "n_max": ("entropy_n_max", int),
        "grid_side": ("entropy_grid_side", int),
        "box_side": ("entropy_box_side", float),
        "lyapunov_window": ("lyapunov_window", int),
        "lyapunov_seeds": ("lyapunov_seeds", int),
    },
    "output": {"dir": ("out_dir", str), "formats": ("formats", "strs")},
}


def _convert(raw: str, kind):
    raw = raw.strip()
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is str:
        return raw
    items = [x.strip() for x in raw.split(",") if x.strip()]
    if kind == "floats":
        return tuple(float(x) for x in items)
    if kind == "ints":
        return tuple(int(x) for x in items)
    if kind == "strs":
        return tuple(items)
    raise AssertionError(kind)


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        known = _SECTIONS[section]
        for key, raw in parser.items(section):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            attr, kind = known[key]
            try:
                values[attr] = _convert(raw, kind)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc
    return ExperimentConfig(**values).validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text())


def default_config_text() -> str:
    cfg = ExperimentConfig()
    lines = []
    for section, keys in _SECTIONS.items():
        lines.append(f"[{section}]")
        for key, (attr, kind) in keys.items():
            val = getattr(cfg, attr)
            if isinstance(val, tuple):
                val = ",".join(str(v) for v in val)
            lines.append(f"{key} = {val}")
        lines.append("")
    return "\n".join(lines)


def config_to_dict(cfg: ExperimentConfig, include_output: bool = False) -> dict:
    """Config as a plain dict; output location is left out of the canonical
    report payload so relocating a run cannot change its bytes."""
    out = {}
    for f in fields(cfg):
        if not include_output and f.name in ("out_dir", "formats"):
            continue
        v = getattr(cfg, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def parse_vector(cfg: ExperimentConfig):
    from prlab.symplectic import IrrationalityVector

    if cfg.vector == "sqrt-primes":
        return IrrationalityVector.sqrt_primes(cfg.n)
    try:
        entries = tuple(float(x) for x in cfg.vector.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad irrationality vector: {cfg.vector!r}") from exc
    if len(entries) != 2 * (cfg.n - 1):
        raise ConfigError(
            f"vector needs {2 * (cfg.n - 1)} entries for n={cfg.n}, got {len(entries)}"
        )
    return IrrationalityVector(n=cfg.n, entries=entries)


def resolve(cfg: ExperimentConfig):
    """Instantiate (torus structure, profiles, base Hamiltonian, dressed)."""
    from prlab.dressing import dress, get_profiles
    from prlab.symplectic import build_omega_irr
    from prlab.systems import catalog_get

    torus = build_omega_irr(parse_vector(cfg))
    try:
        profiles = get_profiles(cfg.profile_id, cfg.profile_params)
        ham = catalog_get(cfg.base_id, cfg.base_params)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    ham.check_periodicity()
    fh = dress(ham, profiles, torus)
    return torus, profiles, ham, fh
