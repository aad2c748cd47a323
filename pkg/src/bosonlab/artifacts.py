"""Profile persistence: two-column CSV bodies with JSON metadata sidecars.

Values are written with ``repr`` (shortest round-trip decimal), so a
save/load cycle reproduces the float64 array bit for bit.  The sidecar
records enough provenance (grid, eigenvalue, mass, residual, tool
version, config hash) to catch accidental mixing of artifacts from
different runs: a hash mismatch on load is a warning, not an error,
because the values themselves are still usable.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, HashMismatchWarning
from .radial import RadialGrid, RadialProfile

TOOL_VERSION = "0.1.0"

_META_KEYS = ("kind", "n", "r_max", "eigenvalue", "mass", "residual",
              "tool_version", "config_hash")


@dataclass(frozen=True, eq=False)
class ProfileRecord:
    profile: RadialProfile
    kind: str
    eigenvalue: float | None = None
    mass: float | None = None
    residual: float | None = None
    config_hash: str = ""

    def metadata(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.profile.grid.n,
            "r_max": self.profile.grid.r_max,
            "eigenvalue": self.eigenvalue,
            "mass": self.mass,
            "residual": self.residual,
            "tool_version": TOOL_VERSION,
            "config_hash": self.config_hash,
        }


def write_series(path, x, y, header="r,value"):
    """Two-column CSV at full decimal precision."""
    lines = [header]
    lines.extend(f"{repr(float(a))},{repr(float(b))}" for a, b in zip(x, y))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_series(path, header="r,value"):
    text = Path(path).read_text(encoding="utf-8")
    lines = text.strip().split("\n")
    if not lines or lines[0] != header:
        raise FormatError(f"{path}: expected header {header!r}")
    try:
        rows = [tuple(float(tok) for tok in line.split(",")) for line in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: malformed numeric row") from exc
    if any(len(row) != 2 for row in rows):
        raise FormatError(f"{path}: expected exactly two columns")
    arr = np.array(rows, dtype=float)
    return arr[:, 0], arr[:, 1]


def save_profile(record: ProfileRecord, path) -> None:
    """Write kind.csv plus the .json sidecar next to it."""
    path = Path(path)
    write_series(path, record.profile.grid.r, record.profile.values)
    sidecar = path.with_suffix(".json")
    sidecar.write_text(
        json.dumps(record.metadata(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load_profile(path, expected_hash: str | None = None) -> ProfileRecord:
    path = Path(path)
    r, vals = read_series(path)
    sidecar = path.with_suffix(".json")
    if not sidecar.exists():
        raise FormatError(f"{sidecar}: metadata sidecar missing")
    try:
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{sidecar}: invalid JSON") from exc
    missing = [k for k in _META_KEYS if k not in meta]
    if missing:
        raise FormatError(f"{sidecar}: missing metadata keys {missing}")
    if len(r) != meta["n"]:
        raise FormatError(
            f"{path}: row count {len(r)} does not match metadata n={meta['n']}"
        )
    grid = RadialGrid(int(meta["n"]), float(meta["r_max"]))
    if not np.allclose(grid.r, r, rtol=0, atol=1e-12 * grid.r_max):
        raise FormatError(f"{path}: r column is not the declared uniform grid")
    if expected_hash is not None and meta["config_hash"] != expected_hash:
        warnings.warn(
            f"{path}: config hash {meta['config_hash']!r} != expected "
            f"{expected_hash!r} (artifact from a different run?)",
            HashMismatchWarning,
            stacklevel=2,
        )
    return ProfileRecord(
        profile=RadialProfile(grid, vals),
        kind=meta["kind"],
        eigenvalue=meta["eigenvalue"],
        mass=meta["mass"],
        residual=meta["residual"],
        config_hash=meta["config_hash"],
    )


def write_json(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
