"""Run configuration: an INI-style file with typed, strictly validated keys.

Every key has a default; unknown sections or keys are hard errors, and all
validation failures are reported at once. The analysis exponents sigma, b,
c are derived from epsilon; setting them directly is rejected unless
`allow_override` is on.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .params import b_index, c_index, data_index, sigma_index, validate_epsilon
from .wiener import DISTRIBUTIONS


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("configuration errors:\n  " + "\n  ".join(problems))


DATA_KINDS = ("gaussian-bump", "sech-power", "file")

_SCHEMA: dict[str, dict[str, tuple[type, object]]] = {
    "grid": {
        "half_length": (float, 32.0),
        "n_modes": (int, 512),
    },
    "time": {
        "t_span": (float, 4.0),
        "m_t": (int, 2048),
    },
    "model": {
        "epsilon": (float, 0.05),
        "s": (float, -1.0),  # -1 means "derive 17/112 + epsilon"
        "allow_override": (bool, False),
        "sigma": (float, float("nan")),
        "b": (float, float("nan")),
        "c": (float, float("nan")),
    },
    "random": {
        "distribution": (str, "gaussian"),
        "master_seed": (int, 20260810),
        "n_max": (int, 0),  # 0 means "cover the data's spectrum"
    },
    "data": {
        "kind": (str, "gaussian-bump"),
        "width": (float, 1.0),
        "amplitude": (float, 1.0),
        "band_limit": (float, 0.0),  # 0 means no sharp truncation
        "path": (str, ""),
    },
    "ensemble": {
        "n_samples": (int, 10000),
        "n_fields": (int, 3),
        "threads": (int, 1),
    },
    "strichartz": {
        "q": (float, 4.0),
        "r": (float, 4.0),
        "t_grid": (str, "0.125,0.25,0.5"),
        "n_time_samples": (int, 64),
    },
    "lwp": {
        "t_grid": (str, "0.25,0.125,0.0625,0.03125"),
        "n_samples": (int, 200),
        "tol": (float, 1e-10),
        "max_iter": (int, 25),
        "xi_band": (float, 4.0),
    },
    "estimates": {
        "ids": (str, "all"),
        "n_trials": (int, 100),
        "n_modes": (int, 64),
        "half_length": (float, 8.0),
        "m_t": (int, 128),
        "t_span": (float, 4.0),
        "xi_band": (float, 3.5),
    },
    "simulate": {
        "t_end": (float, 1.0),
        "dt": (float, 1e-4),
        "output_stride": (int, 0),  # 0 means auto
        "diag_stride": (int, 1),
    },
    "output": {
        "directory": (str, "out"),
    },
}


@dataclass
class RunConfig:
    """Typed view of the configuration with the derived exponents."""

    raw: dict = field(default_factory=dict)

    def __getitem__(self, section: str) -> dict:
        return self.raw[section]

    @property
    def epsilon(self) -> float:
        return self.raw["model"]["epsilon"]

    @property
    def sigma(self) -> float:
        return self.raw["model"]["sigma"]

    @property
    def b(self) -> float:
        return self.raw["model"]["b"]

    @property
    def c(self) -> float:
        return self.raw["model"]["c"]

    @property
    def s(self) -> float:
        return self.raw["model"]["s"]

    @property
    def master_seed(self) -> int:
        return self.raw["random"]["master_seed"]

    def echo(self) -> dict:
        return {sect: dict(vals) for sect, vals in self.raw.items()}


def _parse_value(raw: str, typ: type, where: str, problems: list[str]):
    raw = raw.strip()
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError:
        problems.append(f"{where}: cannot parse {raw!r} as {typ.__name__}")
        return None


def parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def default_config() -> RunConfig:
    raw = {sect: {k: default for k, (_, default) in keys.items()} for sect, keys in _SCHEMA.items()}
    return _finalize(raw, [])


def load_config(path: Path | str | None, overrides: dict | None = None) -> RunConfig:
    """Read the INI file (or defaults when path is None) and validate.

    `overrides` maps "section.key" to already-typed values (used for
    command-line flags such as --seed, --out, --threads).
    """
    problems: list[str] = []
    raw = {sect: {k: default for k, (_, default) in keys.items()} for sect, keys in _SCHEMA.items()}
    explicit: set[tuple[str, str]] = set()

    if path is not None:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError([f"cannot read config file {path}: {exc}"]) from exc
        except configparser.Error as exc:
            raise ConfigError([f"malformed config file {path}: {exc}"]) from exc
        for sect in parser.sections():
            if sect not in _SCHEMA:
                problems.append(f"unknown section [{sect}]")
                continue
            for key, raw_value in parser.items(sect):
                if key not in _SCHEMA[sect]:
                    problems.append(f"unknown key {key!r} in section [{sect}]")
                    continue
                typ = _SCHEMA[sect][key][0]
                value = _parse_value(raw_value, typ, f"[{sect}] {key}", problems)
                if value is not None:
                    raw[sect][key] = value
                    explicit.add((sect, key))

    for dotted, value in (overrides or {}).items():
        sect, _, key = dotted.partition(".")
        raw[sect][key] = value
        explicit.add((sect, key))

    for derived in ("sigma", "b", "c"):
        if ("model", derived) in explicit and not raw["model"]["allow_override"]:
            problems.append(
                f"[model] {derived} is derived from epsilon; set allow_override "
                "= true to replace it"
            )

    return _finalize(raw, problems, explicit)


def _finalize(raw: dict, problems: list[str], explicit: set | None = None) -> RunConfig:
    explicit = explicit or set()
    model = raw["model"]
    try:
        validate_epsilon(model["epsilon"])
    except ValueError as exc:
        problems.append(f"[model] {exc}")

    eps = model["epsilon"]
    if not (("model", "sigma") in explicit and model["allow_override"]):
        model["sigma"] = sigma_index(eps)
    if not (("model", "b") in explicit and model["allow_override"]):
        model["b"] = b_index(eps)
    if not (("model", "c") in explicit and model["allow_override"]):
        model["c"] = c_index(eps)
    if model["s"] < 0:
        model["s"] = data_index(eps)

    if raw["random"]["distribution"] not in DISTRIBUTIONS:
        problems.append(
            f"[random] unknown distribution {raw['random']['distribution']!r}; "
            f"choose from {', '.join(DISTRIBUTIONS)}"
        )
    if raw["data"]["kind"] not in DATA_KINDS:
        problems.append(
            f"[data] unknown kind {raw['data']['kind']!r}; choose from {', '.join(DATA_KINDS)}"
        )
    if raw["data"]["kind"] == "file" and not raw["data"]["path"]:
        problems.append("[data] kind = file requires a path")
    if raw["grid"]["n_modes"] < 8 or raw["grid"]["n_modes"] % 2:
        problems.append("[grid] n_modes must be even and >= 8")
    if raw["grid"]["half_length"] <= 0:
        problems.append("[grid] half_length must be positive")
    if raw["time"]["m_t"] < 16 or raw["time"]["m_t"] % 2:
        problems.append("[time] m_t must be even and >= 16")
    for sect, key in (("strichartz", "t_grid"), ("lwp", "t_grid")):
        try:
            values = parse_float_list(raw[sect][key])
            if not values or any(v <= 0 for v in values):
                raise ValueError
        except ValueError:
            problems.append(f"[{sect}] {key} must be a comma-separated list of positive reals")
    if raw["ensemble"]["threads"] < 1:
        problems.append("[ensemble] threads must be >= 1")

    if problems:
        raise ConfigError(problems)
    return RunConfig(raw=raw)
