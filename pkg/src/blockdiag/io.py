"""JSON serialization of problems and reports.

Matrices are stored row-major as ``[re, im]`` pairs of decimal doubles;
Python's float formatting is shortest-round-trip, so a save/load cycle is
bit-exact. Problem files carry the schema tag ``blockdiag/1``.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .core import BlockMatrix
from .errors import StructuralError

PROBLEM_SCHEMA = "blockdiag/1"
REPORT_SCHEMA = "blockdiag-report/1"


def matrix_to_obj(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise StructuralError(f"can only serialize 2-d matrices, got shape {m.shape}")
    flat = m.ravel(order="C")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_obj(obj, name: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        raise StructuralError(f"{name}: expected an object, got {type(obj).__name__}")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise StructuralError(f"{name}: malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise StructuralError(
            f"{name}: data length {len(data)} does not match {rows}x{cols}"
        )
    values = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(data):
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise StructuralError(f"{name}: entry {i} is not a [re, im] pair")
        re, im = float(entry[0]), float(entry[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise StructuralError(f"{name}: entry {i} is not finite")
        values[i] = complex(re, im)
    return values.reshape(rows, cols)


@dataclass(frozen=True)
class ProblemFile:
    """A block matrix plus optional threshold and free-form metadata."""

    block: BlockMatrix
    mu: float | None = None
    metadata: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        obj = {
            "schema": PROBLEM_SCHEMA,
            "n0": self.block.n0,
            "n1": self.block.n1,
            "A0": matrix_to_obj(self.block.A0),
            "A1": matrix_to_obj(self.block.A1),
            "W0": matrix_to_obj(self.block.W0),
            "W1": matrix_to_obj(self.block.W1),
            "mu": self.mu,
            "metadata": {str(k): str(v) for k, v in self.metadata.items()},
        }
        return obj

    @staticmethod
    def from_obj(obj) -> "ProblemFile":
        if not isinstance(obj, dict):
            raise StructuralError("problem file must contain a JSON object")
        schema = obj.get("schema")
        if schema != PROBLEM_SCHEMA:
            raise StructuralError(
                f"unsupported problem schema {schema!r} (expected {PROBLEM_SCHEMA!r})"
            )
        block = BlockMatrix(
            A0=matrix_from_obj(obj.get("A0"), "A0"),
            A1=matrix_from_obj(obj.get("A1"), "A1"),
            W0=matrix_from_obj(obj.get("W0"), "W0"),
            W1=matrix_from_obj(obj.get("W1"), "W1"),
        )
        if "n0" in obj and int(obj["n0"]) != block.n0:
            raise StructuralError(
                f"declared n0 = {obj['n0']} does not match A0 of size {block.n0}"
            )
        if "n1" in obj and int(obj["n1"]) != block.n1:
            raise StructuralError(
                f"declared n1 = {obj['n1']} does not match A1 of size {block.n1}"
            )
        mu = obj.get("mu")
        if mu is not None:
            mu = float(mu)
            if not math.isfinite(mu):
                raise StructuralError("mu must be finite")
        metadata = obj.get("metadata") or {}
        if not isinstance(metadata, dict):
            raise StructuralError("metadata must be an object")
        return ProblemFile(block=block, mu=mu, metadata=dict(metadata))


def save_problem(path, problem: ProblemFile) -> None:
    write_json_atomic(path, problem.to_obj())


def load_problem(path) -> ProblemFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise StructuralError(f"cannot read problem file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise StructuralError(f"invalid JSON in {path}: {exc}") from exc
    return ProblemFile.from_obj(obj)


def _jsonable(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise StructuralError(f"non-finite numeric value in report: {value!r}")
        return v
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise StructuralError(f"non-finite complex value in report: {value!r}")
        return [z.real, z.imag]
    if isinstance(value, np.ndarray):
        return [_jsonable(x) for x in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(x) for x in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    raise StructuralError(f"cannot serialize value of type {type(value).__name__}")


@dataclass
class Report:
    """Structured run report written by every CLI command."""

    command: str
    inputs_digest: str
    residuals: dict = field(default_factory=dict)
    spectra: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "residuals": _jsonable(self.residuals),
            "spectra": _jsonable(self.spectra),
            "flags": {str(k): bool(v) for k, v in self.flags.items()},
            "certificates": _jsonable(self.certificates),
            "timings": _jsonable(self.timings),
        }


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_file(path) -> str:
    with open(path, "rb") as fh:
        return digest_bytes(fh.read())


def digest_obj(obj) -> str:
    return digest_bytes(
        json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    )


def write_json_atomic(path, obj) -> None:
    """Serialize to a sibling temp file and rename into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    payload = json.dumps(obj, indent=2) + "\n"
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
