"""Dense complex matrices and the 2x2 block-matrix data model.

Every operator in the toolkit is carried by a dense ``numpy`` array with
complex128 entries; the block structure lives in :class:`BlockMatrix`,
which stores the four blocks of ``[[A0, W1], [W0, A1]]`` immutably.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import StructuralError

#: Baseline tolerance used for rank decisions and spectral bands.
DEFAULT_TOL = 1e-10

_TOL_ENV = "BLOCKDIAG_DEFAULT_TOL"


def default_tol() -> float:
    """Baseline numeric tolerance, overridable via ``BLOCKDIAG_DEFAULT_TOL``."""
    raw = os.environ.get(_TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise StructuralError(f"{_TOL_ENV} is not a number: {raw!r}") from exc
    if not (0.0 < value < 1.0):
        raise StructuralError(f"{_TOL_ENV} must lie in (0, 1), got {value}")
    return value


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce input to an immutable, finite, 2-d complex128 array.

    Scalars and 1-d sequences are promoted to 1x1 / row shape via
    ``np.atleast_2d`` so small fixtures can be written as ``[0]`` etc.
    """
    m = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if m.ndim != 2:
        raise StructuralError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise StructuralError(f"{name} contains non-finite entries")
    m = m.copy()
    m.flags.writeable = False
    return m


def operator_norm(m) -> float:
    """Largest singular value of ``m`` (0.0 for empty matrices)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def is_hermitian(m, tol: float | None = None) -> bool:
    """Whether ``m`` equals its conjugate transpose up to ``tol * norm``."""
    m = np.asarray(m, dtype=np.complex128)
    if tol is None:
        tol = default_tol()
    scale = operator_norm(m)
    return operator_norm(m - m.conj().T) <= tol * max(scale, 1.0)


@dataclass(frozen=True)
class BlockMatrix:
    """The 2x2 block matrix ``[[A0, W1], [W0, A1]]`` on H0 (+) H1.

    ``A0`` (n0 x n0) and ``A1`` (n1 x n1) are the diagonal blocks,
    ``W0`` (n1 x n0) maps H0 into H1 and ``W1`` (n0 x n1) maps H1 into H0.
    Instances are immutable; all derived matrices are fresh arrays.
    """

    A0: np.ndarray
    A1: np.ndarray
    W0: np.ndarray
    W1: np.ndarray

    def __post_init__(self):
        for name in ("A0", "A1", "W0", "W1"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        n0 = self.A0.shape[0]
        n1 = self.A1.shape[0]
        if self.A0.shape != (n0, n0):
            raise StructuralError(f"A0 must be square, got {self.A0.shape}")
        if self.A1.shape != (n1, n1):
            raise StructuralError(f"A1 must be square, got {self.A1.shape}")
        if self.W0.shape != (n1, n0):
            raise StructuralError(
                f"W0 must have shape {(n1, n0)}, got {self.W0.shape}"
            )
        if self.W1.shape != (n0, n1):
            raise StructuralError(
                f"W1 must have shape {(n0, n1)}, got {self.W1.shape}"
            )

    @property
    def n0(self) -> int:
        return self.A0.shape[0]

    @property
    def n1(self) -> int:
        return self.A1.shape[0]

    @property
    def dim(self) -> int:
        return self.n0 + self.n1

    def assemble(self) -> np.ndarray:
        """Full ``(n0+n1) x (n0+n1)`` matrix ``[[A0, W1], [W0, A1]]``."""
        return assemble(self)

    def diagonal_part(self) -> np.ndarray:
        """Full matrix of the diagonal part ``A = diag(A0, A1)``."""
        n0, n1 = self.n0, self.n1
        a = np.zeros((n0 + n1, n0 + n1), dtype=np.complex128)
        a[:n0, :n0] = self.A0
        a[n0:, n0:] = self.A1
        return a

    def offdiagonal_part(self) -> np.ndarray:
        """Full matrix of the coupling part ``V = [[0, W1], [W0, 0]]``."""
        n0, n1 = self.n0, self.n1
        v = np.zeros((n0 + n1, n0 + n1), dtype=np.complex128)
        v[:n0, n0:] = self.W1
        v[n0:, :n0] = self.W0
        return v

    def swapped(self) -> "BlockMatrix":
        """Exchange the roles of H0 and H1 (permutation similarity)."""
        return BlockMatrix(A0=self.A1, A1=self.A0, W0=self.W1, W1=self.W0)


def assemble(b: BlockMatrix) -> np.ndarray:
    """Assemble the four blocks into the full dense matrix."""
    n0, n1 = b.n0, b.n1
    m = np.empty((n0 + n1, n0 + n1), dtype=np.complex128)
    m[:n0, :n0] = b.A0
    m[:n0, n0:] = b.W1
    m[n0:, :n0] = b.W0
    m[n0:, n0:] = b.A1
    return m


def split(m, n0: int) -> BlockMatrix:
    """Inverse of :func:`assemble`; exact (bitwise) slicing of the blocks."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"matrix to split must be square, got {m.shape}")
    n = m.shape[0]
    if not (0 < n0 < n):
        raise StructuralError(f"n0 must satisfy 0 < n0 < {n}, got {n0}")
    return BlockMatrix(
        A0=m[:n0, :n0], A1=m[n0:, n0:], W0=m[n0:, :n0], W1=m[:n0, n0:]
    )


def is_symmetric_offdiag(b: BlockMatrix, tol: float | None = None) -> bool:
    """Whether the coupling is symmetric, ``W0 = W1*`` up to tolerance."""
    if tol is None:
        tol = default_tol()
    defect = operator_norm(b.W0 - b.W1.conj().T)
    return defect <= tol * (1.0 + operator_norm(b.W1))


@dataclass(frozen=True)
class SignatureJ:
    """The unitary involution ``J = diag(I_{n0}, -I_{n1})``."""

    n0: int
    n1: int

    def __post_init__(self):
        if self.n0 < 0 or self.n1 < 0:
            raise StructuralError("SignatureJ dimensions must be non-negative")

    @property
    def matrix(self) -> np.ndarray:
        d = np.ones(self.n0 + self.n1, dtype=np.complex128)
        d[self.n0:] = -1.0
        return np.diag(d)

    def conjugate(self, m) -> np.ndarray:
        """``J m J``, computed exactly by flipping off-diagonal block signs."""
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (self.n0 + self.n1,) * 2:
            raise StructuralError(
                f"matrix shape {m.shape} does not match J of size {self.n0 + self.n1}"
            )
        out = m.copy()
        out[: self.n0, self.n0:] *= -1.0
        out[self.n0:, : self.n0] *= -1.0
        return out
