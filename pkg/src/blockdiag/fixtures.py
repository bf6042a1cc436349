"""Seeded random problem generation.

The generator produces Hermitian block matrices with the diagonal spectra
pushed to opposite sides of zero by a prescribed gap and a coupling block
of prescribed norm. With a closed gap it can plant an exact kernel at
zero whose structure splits along H0 and H1 (zero eigenvalues of the
diagonal blocks whose eigenvectors are annihilated by the coupling).
"""

from __future__ import annotations

import numpy as np

from .core import BlockMatrix, operator_norm
from .errors import StructuralError
from .io import ProblemFile


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _hermitian_with_spectrum(
    rng: np.random.Generator, eigenvalues: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    n = eigenvalues.size
    q = _haar_unitary(rng, n)
    m = (q * eigenvalues) @ q.conj().T
    return 0.5 * (m + m.conj().T), q


def random_case(
    n0: int,
    n1: int,
    gap: float,
    coupling: float,
    seed: int,
    kernel_dim: int = 0,
) -> ProblemFile:
    """Deterministic-from-seed Hermitian fixture with subordinated spectra.

    ``spec(A0)`` lies in ``(-inf, -gap/2]`` and ``spec(A1)`` in
    ``[gap/2, inf)``; ``W1`` is random with ``norm(W1) = coupling`` and
    ``W0 = W1*``. With ``kernel_dim > 0`` (which requires ``gap = 0``)
    exact zero eigenvalues are planted on both diagonal blocks, with the
    corresponding eigenvectors removed from the range and kernel of the
    coupling so the assembled matrix has a kernel of that dimension at 0.
    """
    if n0 < 1 or n1 < 1:
        raise StructuralError("block dimensions must be positive")
    if gap < 0 or coupling < 0:
        raise StructuralError("gap and coupling must be non-negative")
    if kernel_dim < 0 or kernel_dim > min(n0, n1):
        raise StructuralError(
            f"kernel_dim must lie in [0, min(n0, n1)] = [0, {min(n0, n1)}]"
        )
    if kernel_dim > 0 and gap > 0:
        raise StructuralError("planting a kernel at 0 requires gap = 0")
    rng = np.random.default_rng(seed)
    k0 = (kernel_dim + 1) // 2
    k1 = kernel_dim // 2
    lam0 = -gap / 2.0 - rng.uniform(0.25, 2.0, size=n0)
    lam1 = gap / 2.0 + rng.uniform(0.25, 2.0, size=n1)
    lam0[:k0] = 0.0
    lam1[:k1] = 0.0
    a0, q0 = _hermitian_with_spectrum(rng, lam0)
    a1, q1 = _hermitian_with_spectrum(rng, lam1)
    w1 = rng.standard_normal((n0, n1)) + 1j * rng.standard_normal((n0, n1))
    if k0 > 0:
        v0 = q0[:, :k0]
        w1 = w1 - v0 @ (v0.conj().T @ w1)
    if k1 > 0:
        v1 = q1[:, :k1]
        w1 = w1 - (w1 @ v1) @ v1.conj().T
    norm_w1 = operator_norm(w1)
    if coupling > 0.0:
        if norm_w1 == 0.0:
            raise StructuralError(
                "coupling projection annihilated the random block; "
                "reduce kernel_dim or enlarge the blocks"
            )
        w1 = w1 * (coupling / norm_w1)
    else:
        w1 = np.zeros_like(w1)
    block = BlockMatrix(A0=a0, A1=a1, W0=w1.conj().T, W1=w1)
    metadata = {
        "generator": "random_case",
        "seed": str(seed),
        "gap": repr(float(gap)),
        "coupling": repr(float(coupling)),
        "kernel_dim": str(kernel_dim),
    }
    return ProblemFile(block=block, mu=0.0, metadata=metadata)
