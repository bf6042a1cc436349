"""Resolvent-based smallness criteria for the off-diagonal coupling.

The quantity ``norm(V (A - lambda)^{-1})`` measures the coupling against
the diagonal part. If ``max(1, norm(Y)) * norm(V (A - lambda)^{-1}) < 1``
for a shift in the resolvent set of A, a Neumann series places ``lambda``
in the resolvent sets of both ``A + V`` and ``A - Y V``; sweeping shifts
along the imaginary axis estimates the relative bound of V with respect
to a Hermitian A.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .angular import AngularPair
from .core import BlockMatrix, default_tol, is_hermitian, operator_norm
from .errors import ContractError, NumericError, ResolventError, StructuralError
from .spectral import eigenvalues


@dataclass(frozen=True)
class NeumannCertificate:
    """Certificate data for the resolvent-intersection criterion.

    ``holds`` iff ``product = max(1, norm_Y) * norm_V_resolvent < 1``.
    When it holds, ``sigma_min_B`` and ``sigma_min_AYV`` record the
    verified distances of the shift from the spectra of ``A + V`` and
    ``A - Y V`` (smallest singular values of the shifted matrices).
    """

    lam: complex
    norm_V_resolvent: float
    norm_Y: float
    product: float
    holds: bool
    sigma_min_B: float | None = None
    sigma_min_AYV: float | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class RelativeBoundEstimate:
    """Sweep-based estimate of the relative bound of V against A.

    ``b_star`` is the smallest resolvent norm seen on the sweep, ``(a, b)``
    is the certified pair (norm(V), b_star), ``lambda_sweep`` records
    (shift, resolvent norm) samples and ``resolvent_growth`` the products
    ``|shift| * norm((A - shift)^{-1})`` on the same sweep (informational:
    boundedness of those products is the regularity half of the zero-bound
    criterion, which is automatic at finite dimension).
    """

    a: float
    b: float
    b_star: float
    lambda_sweep: list = field(default_factory=list)
    resolvent_growth: list = field(default_factory=list)
    validation_max_violation: float = 0.0


def resolvent_norm(b: BlockMatrix, lam: complex) -> float:
    """``norm(V (A - lam)^{-1})`` for the diagonal/off-diagonal split of b."""
    lam = complex(lam)
    a = b.diagonal_part()
    v = b.offdiagonal_part()
    spec_a = eigenvalues(a)
    scale = operator_norm(a)
    dist = float(np.min(np.abs(spec_a - lam)))
    if dist < 1e-10 * max(scale, 1.0):
        raise ResolventError(
            f"shift {lam} is within {dist:.3e} of spec(A) (norm {scale:.3e})"
        )
    shifted = a - lam * np.eye(a.shape[0], dtype=np.complex128)
    # V (A - lam)^{-1} = solve((A - lam)^H, V^H)^H
    product = np.linalg.solve(shifted.conj().T, v.conj().T).conj().T
    return operator_norm(product)


def neumann_certificate(b: BlockMatrix, p: AngularPair, lam: complex) -> NeumannCertificate:
    """Evaluate the Neumann criterion at a shift and certify its claims.

    When the criterion holds, the smallest singular values of ``B - lam``
    and ``A - Y V - lam`` are computed and checked against the Neumann
    lower bound ``sigma_min(A - lam) * (1 - contraction)`` with 10% slack.
    """
    lam = complex(lam)
    nv = resolvent_norm(b, lam)
    norm_y = operator_norm(p.Y)
    product = max(1.0, norm_y) * nv
    holds = product < 1.0
    sigma_b = None
    sigma_ayv = None
    if holds:
        a = b.diagonal_part()
        v = b.offdiagonal_part()
        y = p.Y
        eye = np.eye(a.shape[0], dtype=np.complex128)
        sigma_a = float(np.linalg.svd(a - lam * eye, compute_uv=False)[-1])
        sigma_b = float(
            np.linalg.svd(b.assemble() - lam * eye, compute_uv=False)[-1]
        )
        sigma_ayv = float(
            np.linalg.svd(a - y @ v - lam * eye, compute_uv=False)[-1]
        )
        floor_b = sigma_a * (1.0 - nv)
        floor_ayv = sigma_a * (1.0 - product)
        if sigma_b < 0.9 * floor_b or sigma_ayv < 0.9 * floor_ayv:
            raise NumericError(
                "certificate holds but Neumann distance bound fails",
                diagnostics={
                    "sigma_min_B": sigma_b,
                    "sigma_min_AYV": sigma_ayv,
                    "floor_B": floor_b,
                    "floor_AYV": floor_ayv,
                },
            )
    return NeumannCertificate(
        lam=lam,
        norm_V_resolvent=nv,
        norm_Y=norm_y,
        product=product,
        holds=holds,
        sigma_min_B=sigma_b,
        sigma_min_AYV=sigma_ayv,
    )


def sweep_resolvent_norms(b: BlockMatrix, shifts) -> list:
    """``(shift, norm(V (A - shift)^{-1}))`` samples for arbitrary shifts.

    Escape hatch for diagonal parts that are not Hermitian (e.g.
    m-accretive): the caller supplies the shift list instead of an
    imaginary-axis grid.
    """
    shifts = [complex(s) for s in shifts]
    if not shifts:
        raise StructuralError("shift list must not be empty")
    return [(lam, resolvent_norm(b, lam)) for lam in shifts]


def estimate_relative_bound(
    b: BlockMatrix, tau_grid, samples: int = 32, seed: int = 0
) -> RelativeBoundEstimate:
    """Estimate the relative bound of V against a Hermitian A.

    Sweeps shifts ``i tau`` over the (positive, ascending) grid; the
    smallest resolvent norm is the reported bound. The certified pair
    ``(norm(V), b_star)`` is validated on a random sample of unit vectors.
    """
    taus = [float(t) for t in tau_grid]
    if not taus:
        raise StructuralError("tau_grid must not be empty")
    if any(t <= 0 for t in taus) or any(
        t2 <= t1 for t1, t2 in zip(taus, taus[1:])
    ):
        raise StructuralError("tau_grid must be positive and strictly ascending")
    a = b.diagonal_part()
    if not is_hermitian(a, default_tol()):
        raise ContractError("relative-bound sweep requires a Hermitian diagonal part")
    v = b.offdiagonal_part()
    eye = np.eye(a.shape[0], dtype=np.complex128)
    sweep = []
    growth = []
    for tau in taus:
        lam = 1j * tau
        sweep.append((lam, resolvent_norm(b, lam)))
        inv_norm = 1.0 / float(
            np.linalg.svd(a - lam * eye, compute_uv=False)[-1]
        )
        growth.append((lam, abs(lam) * inv_norm))
    b_star = min(r for _, r in sweep)
    a_const = operator_norm(v)
    rng = np.random.default_rng(seed)
    worst = 0.0
    n = a.shape[0]
    for _ in range(samples):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        gap = np.linalg.norm(v @ x) - (a_const + b_star * np.linalg.norm(a @ x))
        worst = max(worst, float(gap))
    if worst > 1e-12 * max(a_const, 1.0):
        raise NumericError(
            "relative-bound pair failed sample validation",
            diagnostics={"max_violation": worst},
        )
    return RelativeBoundEstimate(
        a=a_const,
        b=b_star,
        b_star=b_star,
        lambda_sweep=sweep,
        resolvent_growth=growth,
        validation_max_violation=worst,
    )
