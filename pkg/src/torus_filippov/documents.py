"""JSON system documents, run reports, and deterministic serialization.

A system document carries the exterior matrix A plus either the full interior
matrix B or the single free entry b21 from which B is derived.  Documents
with an explicit B must satisfy the inelastic coefficient relations unless
the caller opts out (which unlocks only pointwise sliding evaluation and
region maps downstream).

All floats are serialized round-trip exactly; reports carry content digests
and basenames rather than absolute paths so identical inputs produce
byte-identical files regardless of where they are written.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import TorusFilippovError
from .fields import LinearField, PiecewiseSystem, derive_inelastic_b, is_inelastic
from .geometry import TorusSpec


class DocumentError(TorusFilippovError):
    """Malformed or inconsistent system/config document."""


def _as_matrix(value, name: str) -> np.ndarray:
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"'{name}' must be a 3x3 array of numbers: {exc}") from None
    if m.shape != (3, 3):
        raise DocumentError(f"'{name}' must be 3x3, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DocumentError(f"'{name}' contains non-finite entries")
    return m


def system_from_dict(doc: dict, allow_non_inelastic: bool = False) -> PiecewiseSystem:
    if not isinstance(doc, dict):
        raise DocumentError("system document must be a JSON object")
    if "A" not in doc:
        raise DocumentError("missing required key 'A'")
    a = _as_matrix(doc["A"], "A")

    torus_doc = doc.get("torus", {})
    if not isinstance(torus_doc, dict):
        raise DocumentError("'torus' must be an object with keys R and r")
    try:
        torus = TorusSpec(float(torus_doc.get("R", 2.0)), float(torus_doc.get("r", 1.0)))
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"invalid torus radii: {exc}") from None

    has_b = "B" in doc
    has_b21 = "b21" in doc
    if has_b and has_b21:
        raise DocumentError("provide exactly one of 'B' or 'b21', not both")
    if not has_b and not has_b21:
        raise DocumentError("missing 'B' or 'b21'")

    if has_b21:
        try:
            b = derive_inelastic_b(a, float(doc["b21"]))
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"invalid 'b21': {exc}") from None
    else:
        b = _as_matrix(doc["B"], "B")

    sys = PiecewiseSystem(interior=LinearField(b), exterior=LinearField(a), torus=torus)
    if has_b and not allow_non_inelastic and not is_inelastic(sys):
        raise DocumentError(
            "document's (A, B) pair is not inelastic; pass --allow-non-inelastic "
            "to load it anyway"
        )
    return sys


def load_system(path: str, allow_non_inelastic: bool = False) -> PiecewiseSystem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read system file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {path}: {exc}") from None
    return system_from_dict(doc, allow_non_inelastic)


def system_to_dict(sys: PiecewiseSystem) -> dict:
    return {
        "A": sys.A.tolist(),
        "B": sys.B.tolist(),
        "torus": {"R": sys.torus.R, "r": sys.torus.r},
    }


def json_dumps(obj) -> str:
    """Deterministic JSON text: sorted keys, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(obj, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json_dumps(obj))


def format_float(x: float) -> str:
    """Fixed 17-significant-digit formatting; round-trips float64 exactly."""
    return format(float(x), ".17g")


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


@dataclass
class RunReport:
    command: str
    inputs: dict
    outputs: list[str]
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
        }


def make_report(command: str, input_paths: dict[str, str], outputs: list[str], diagnostics: dict) -> RunReport:
    inputs = {
        name: {"file": os.path.basename(path), "sha256": sha256_of(path)}
        for name, path in input_paths.items()
    }
    return RunReport(
        command=command,
        inputs=inputs,
        outputs=[os.path.basename(p) for p in outputs],
        diagnostics=diagnostics,
    )
