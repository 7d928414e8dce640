"""Run configuration: defaults, YAML file, environment overrides and validation.

Precedence, lowest first: built-in defaults, the ``--config`` file, ``SO14LAB_*``
environment variables, command-line flags.  Environment variables name a
config key path with ``__`` between levels, for example
``SO14LAB_GRID__N=512`` or ``SO14LAB_POTENTIAL__KIND=coulomb``; values are
parsed as YAML scalars or flow sequences (``SO14LAB_MASSES="[0.3, 0.7]"``).
"""

from __future__ import annotations

import copy
import os
import re
from dataclasses import dataclass

import yaml

from ..params import SystemParams
from ..spectral.potentials import PotentialSpec

ENV_PREFIX = "SO14LAB_"
DEFAULT_SEED = 20240917
FORMATS = ("json", "csv")
POTENTIAL_KINDS = ("none", "coulomb", "yukawa", "linear")

DEFAULTS = {
    "R": 10.0,
    "masses": [0.5, 0.5],
    "seed": DEFAULT_SEED,
    "jobs": 1,
    "grid": {"r_min": 1e-2, "r_max": 1e2, "n": 256},
    "lambda_grid": {"min": -1.0, "max": 1.0, "n": 5},
    "potential": {"kind": "none", "alpha": 0.0, "range": 1.0, "slope": 0.0, "r_c": 1e-3},
    "casimir_mu": [0.0, 1.0, 2.0, 5.0],
    "tolerances": {},
    "allow_loose_tolerances": False,
    "output": {"path": "so14lab-out", "format": "json"},
}


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent floats without a dot (``1e-3``)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?$|^[-+]?\.(?:inf|Inf|INF)$|^\.(?:nan|NaN|NAN)$"),
    list("-+0123456789."))


def _yaml(text):
    return yaml.load(text, Loader=_Loader)  # noqa: S506 (safe loader subclass)


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the offending key (``grid.n``)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _merge(base: dict, over: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        path = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(path, "unknown key")
        if isinstance(base[key], dict) and key != "tolerances":
            if not isinstance(val, dict):
                raise ConfigError(path, "expected a mapping")
            out[key] = _merge(base[key], val, path + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def _nest(path: list, value) -> dict:
    out = value
    for key in reversed(path):
        out = {key: out}
    return out


def env_overrides(environ=None) -> dict:
    """Config fragment built from ``SO14LAB_*`` variables."""
    environ = os.environ if environ is None else environ
    frag: dict = {}
    for name in sorted(environ):
        if not name.startswith(ENV_PREFIX):
            continue
        keys = name[len(ENV_PREFIX):].split("__")
        keys = [k if k == "R" else k.lower() for k in keys]
        try:
            value = _yaml(environ[name])
        except yaml.YAMLError as exc:
            raise ConfigError(".".join(keys), f"cannot parse environment value: {exc}") from exc
        node = frag
        for k in keys[:-1]:
            node = node.setdefault(k, {})
            if not isinstance(node, dict):
                raise ConfigError(".".join(keys), "conflicting environment overrides")
        node[keys[-1]] = value
    return frag


def load_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = _yaml(fh)
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError("--config", f"not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("--config", "top level must be a mapping")
    return data


def _number(cfg, path, positive=True, integer=False, minimum=None):
    node = cfg
    for k in path.split("."):
        node = node[k]
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(path, f"expected a number, got {node!r}")
    if integer and int(node) != node:
        raise ConfigError(path, f"expected an integer, got {node!r}")
    if positive and not node > 0:
        raise ConfigError(path, f"must be positive, got {node!r}")
    if minimum is not None and node < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {node!r}")
    return int(node) if integer else float(node)


@dataclass(frozen=True)
class RunConfig:
    """Validated effective configuration; ``data`` is echoed into every report."""

    data: dict

    @property
    def R(self) -> float:
        return float(self.data["R"])

    @property
    def masses(self) -> list:
        return [float(m) for m in self.data["masses"]]

    @property
    def seed(self) -> int:
        return int(self.data["seed"])

    @property
    def jobs(self) -> int:
        return int(self.data["jobs"])

    @property
    def grid(self) -> dict:
        return self.data["grid"]

    @property
    def lambda_grid(self) -> dict:
        return self.data["lambda_grid"]

    @property
    def output(self) -> dict:
        return self.data["output"]

    @property
    def params(self) -> SystemParams:
        return SystemParams.from_masses(self.masses, R=self.R)

    def potential(self) -> PotentialSpec | None:
        """The configured potential, or ``None`` for ``kind: none``."""
        p = self.data["potential"]
        kind = p["kind"]
        if kind == "none":
            return None
        if kind == "coulomb":
            return PotentialSpec.coulomb(p["alpha"], r_c=p["r_c"])
        if kind == "yukawa":
            return PotentialSpec.yukawa(p["alpha"], p["range"], r_c=p["r_c"])
        return PotentialSpec.linear(p["slope"], r_c=p["r_c"])

    def tolerance(self, suite: str, check: str, default: float) -> float:
        return float(self.data["tolerances"].get(suite, {}).get(check, default))


def validate(data: dict, known_tolerances: dict | None = None) -> RunConfig:
    """Check types and ranges; raise :class:`ConfigError` naming the field path.

    ``known_tolerances`` maps suite -> {check: default}.  Overrides must name
    a known check and may only tighten it unless ``allow_loose_tolerances``.
    """
    _number(data, "R")
    masses = data["masses"]
    if not isinstance(masses, list) or not 2 <= len(masses) <= 3:
        raise ConfigError("masses", "expected a list of two or three masses")
    for i, m in enumerate(masses):
        if isinstance(m, bool) or not isinstance(m, (int, float)) or not m > 0:
            raise ConfigError(f"masses[{i}]", f"must be a positive number, got {m!r}")
    _number(data, "seed", positive=False, integer=True, minimum=0)
    if data["seed"] >= 2**64:
        raise ConfigError("seed", "must fit in 64 bits")
    _number(data, "jobs", integer=True)
    _number(data, "grid.r_min")
    _number(data, "grid.r_max")
    _number(data, "grid.n", integer=True, minimum=16)
    if data["grid"]["r_max"] <= data["grid"]["r_min"]:
        raise ConfigError("grid.r_max", "must exceed grid.r_min")
    _number(data, "lambda_grid.min", positive=False)
    _number(data, "lambda_grid.max", positive=False)
    _number(data, "lambda_grid.n", integer=True)
    if data["lambda_grid"]["max"] < data["lambda_grid"]["min"]:
        raise ConfigError("lambda_grid.max", "must not be below lambda_grid.min")
    pot = data["potential"]
    if pot["kind"] not in POTENTIAL_KINDS:
        raise ConfigError("potential.kind", f"expected one of {POTENTIAL_KINDS}, got {pot['kind']!r}")
    _number(data, "potential.r_c")
    _number(data, "potential.range")
    _number(data, "potential.alpha", positive=False)
    _number(data, "potential.slope", positive=False)
    mus = data["casimir_mu"]
    if not isinstance(mus, list) or not mus:
        raise ConfigError("casimir_mu", "expected a nonempty list")
    for i, mu in enumerate(mus):
        if isinstance(mu, bool) or not isinstance(mu, (int, float)):
            raise ConfigError(f"casimir_mu[{i}]", f"expected a number, got {mu!r}")
    if not isinstance(data["allow_loose_tolerances"], bool):
        raise ConfigError("allow_loose_tolerances", "expected true or false")
    if data["output"]["format"] not in FORMATS:
        raise ConfigError("output.format", f"expected one of {FORMATS}")
    if not isinstance(data["output"]["path"], str) or not data["output"]["path"]:
        raise ConfigError("output.path", "expected a nonempty string")
    tols = data["tolerances"]
    if not isinstance(tols, dict):
        raise ConfigError("tolerances", "expected a mapping of suite -> {check: value}")
    for suite, checks in tols.items():
        if known_tolerances is not None and suite not in known_tolerances:
            raise ConfigError(f"tolerances.{suite}", "unknown suite")
        if not isinstance(checks, dict):
            raise ConfigError(f"tolerances.{suite}", "expected a mapping of check -> value")
        for check, value in checks.items():
            path = f"tolerances.{suite}.{check}"
            defaults = (known_tolerances or {}).get(suite)
            if defaults is not None and check not in defaults:
                raise ConfigError(path, f"unknown check; expected one of {sorted(defaults)}")
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(path, f"must be a positive number, got {value!r}")
            if defaults is not None and value > defaults[check] and not data["allow_loose_tolerances"]:
                raise ConfigError(path, f"{value!r} loosens the default {defaults[check]!r}; "
                                        "set allow_loose_tolerances (or pass "
                                        "--allow-loose-tolerances) to accept it")
    return RunConfig(data)


def build_config(path=None, environ=None, flags: dict | None = None,
                 known_tolerances: dict | None = None) -> RunConfig:
    """Defaults, then the file at ``path``, then the environment, then ``flags``.

    ``flags`` holds dotted key paths (``{"grid.n": 512}``) with ``None``
    meaning "not given".
    """
    data = copy.deepcopy(DEFAULTS)
    if path is not None:
        data = _merge(data, load_file(path))
    data = _merge(data, env_overrides(environ))
    for key, value in (flags or {}).items():
        if value is None:
            continue
        data = _merge(data, _nest(key.split("."), value))
    return validate(data, known_tolerances)
