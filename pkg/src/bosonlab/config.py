"""Run configuration: dotted-key text files, validation, hashing.

The config format is deliberately plain: one ``section.key = value`` per
line, ``#`` comments, UTF-8.  Absent keys take the documented defaults;
unknown keys are rejected so that typos fail loudly instead of silently
running with defaults.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

from .errors import ParseError, ValidationError

_SCHEMA = {
    # key: (type, default, validator or None, description)
    "grid.n": (int, 2048, lambda v: v >= 4, ">= 4"),
    "grid.r_max": (float, 400.0, lambda v: v > 0, "> 0"),
    "tgrid.m": (int, 1024, lambda v: v >= 4, ">= 4"),
    "tgrid.t_max": (float, 200.0, lambda v: v > 0, "> 0"),
    "solver.init": (str, "gaussian", lambda v: v in ("gaussian", "exponential", "ball"),
                    "one of gaussian/exponential/ball"),
    "solver.init_param": (float, 1.0, lambda v: v > 0, "> 0"),
    "solver.tol": (float, 1e-10, lambda v: v > 0, "> 0"),
    "solver.max_iter": (int, 5000, lambda v: v >= 1, ">= 1"),
    "solver.relaxation": (float, 1.0, lambda v: 0.0 < v <= 1.0, "in (0, 1]"),
    "solver.seed": (int, 7, lambda v: v >= 0, ">= 0"),
    "linearization.ell_max": (int, 3, lambda v: v >= 0, ">= 0"),
    "linearization.k_eigs": (int, 3, lambda v: v >= 1, ">= 1"),
    "extension.basis_size": (int, 21, lambda v: v >= 4, ">= 4"),
    "output.directory": (str, "artifacts", None, ""),
    "output.formats": (str, "csv,json,png", None, ""),
}

_FIELD_OF_KEY = {k: k.replace(".", "_") for k in _SCHEMA}
_KEY_OF_FIELD = {v: k for k, v in _FIELD_OF_KEY.items()}


@dataclass(frozen=True)
class RunConfig:
    grid_n: int = 2048
    grid_r_max: float = 400.0
    tgrid_m: int = 1024
    tgrid_t_max: float = 200.0
    solver_init: str = "gaussian"
    solver_init_param: float = 1.0
    solver_tol: float = 1e-10
    solver_max_iter: int = 5000
    solver_relaxation: float = 1.0
    solver_seed: int = 7
    linearization_ell_max: int = 3
    linearization_k_eigs: int = 3
    extension_basis_size: int = 21
    output_directory: str = "artifacts"
    output_formats: str = "csv,json,png"

    def __post_init__(self):
        for key, (typ, _, check, bound) in _SCHEMA.items():
            val = getattr(self, _FIELD_OF_KEY[key])
            if not isinstance(val, typ):
                raise ValidationError(f"{key} must be {typ.__name__}", field=key)
            if check is not None and not check(val):
                raise ValidationError(f"{key} = {val!r} violates bound {bound}", field=key)

    def with_overrides(self, **kwargs) -> "RunConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)


# defaults as a plain dict, keyed by dotted name
DEFAULTS = {k: entry[1] for k, entry in _SCHEMA.items()}
# keep the dataclass defaults and the schema defaults in lockstep
assert all(getattr(RunConfig(), _FIELD_OF_KEY[k]) == DEFAULTS[k] for k in _SCHEMA)


def _coerce(key, raw, lineno):
    typ = _SCHEMA[key][0]
    try:
        if typ is int:
            v = int(raw)
        elif typ is float:
            v = float(raw)
        else:
            v = raw
    except ValueError as exc:
        raise ParseError(
            f"line {lineno}: cannot read {raw!r} as {typ.__name__} for {key}",
            line=lineno,
        ) from exc
    return v


def parse_config(path) -> RunConfig:
    """Read a dotted-key config file; absent keys take the defaults."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ParseError(
                    f"line {lineno}: expected 'section.key = value'", line=lineno
                )
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in _SCHEMA:
                raise ValidationError(f"unknown config key {key!r}", field=key)
            values[_FIELD_OF_KEY[key]] = _coerce(key, raw, lineno)
    return RunConfig(**{**{_FIELD_OF_KEY[k]: d for k, d in DEFAULTS.items()},
                        **values})


def serialize(cfg: RunConfig) -> str:
    """Normalized text form: every key, schema order, repr-precision values."""
    lines = []
    for key in _SCHEMA:
        val = getattr(cfg, _FIELD_OF_KEY[key])
        lines.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize(cfg).encode("utf-8")).hexdigest()[:16]
