"""Fixed-step power iteration plus its guarantees as checkable formulas.

The sub-routine runs a fixed number of multiply-and-normalize steps (no
adaptive stopping), so the step count stays meaningful for the error budgets
evaluated in :mod:`deflatrix.bounds`. The closed-form guarantees here are
pure formula evaluations; property tests compare them against measured runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateIterateError, DimensionMismatchError, InvalidSpectrumError
from .linalg import SymMatrix

__all__ = [
    "PowerIterResult",
    "check_init_alignment",
    "pi_alignment_bound",
    "pi_error_bound",
    "power_iterate",
    "random_init_threshold",
]

_UNIT_TOL = 1e-10


@dataclass(frozen=True)
class PowerIterResult:
    """Outcome of a fixed-step power iteration.

    ``init_alignment`` is |x_0 . u| against the oracle top eigenvector; it is
    filled in by callers that know the oracle (the deflation driver) and left
    None otherwise.
    """

    x_t: np.ndarray
    rayleigh: float
    steps: int
    init: np.ndarray
    init_alignment: float | None = None


def power_iterate(
    m: SymMatrix, x0: np.ndarray, t: int, *, stop_residual: float | None = None
) -> PowerIterResult:
    """Run exactly ``t`` multiply-and-normalize steps from unit vector ``x0``.

    ``stop_residual`` optionally enables early stopping once the eigen-residual
    ||M x - (x.Mx) x|| drops below it; off by default so the recorded step
    count stays the nominal budget the error formulas reason about.
    """
    x0 = np.ascontiguousarray(x0, dtype=float)
    if x0.shape != (m.dim,):
        raise DimensionMismatchError(f"start vector shape {x0.shape} incompatible with dim {m.dim}")
    if abs(np.linalg.norm(x0) - 1.0) > _UNIT_TOL:
        raise ValueError("start vector must have unit norm")
    if t < 0:
        raise ValueError("step count must be non-negative")
    a = m.array
    x = x0
    steps = 0
    for _ in range(t):
        y = a @ x
        n = float(np.linalg.norm(y))
        if n < 1e-300:
            raise DegenerateIterateError("iterate vanished: start vector lies in the kernel")
        x = y / n
        steps += 1
        if stop_residual is not None:
            z = a @ x
            if float(np.linalg.norm(z - (x @ z) * x)) <= stop_residual:
                break
    rayleigh = float(x @ (a @ x))
    return PowerIterResult(x_t=x, rayleigh=rayleigh, steps=steps, init=x0)


def pi_error_bound(sigma1: float, sigma2: float, t: int) -> float:
    """Distance guarantee sqrt(2) * (sigma2/sigma1)**t for the iterate.

    Bounds min over signs of ||s*x_t - a_1||_2, valid once the start vector
    has alignment at least 1/sqrt(2) with the top eigenvector. Equals sqrt(2)
    at t = 0 and decreases geometrically.
    """
    if not sigma1 > sigma2 >= 0:
        raise InvalidSpectrumError("need sigma1 > sigma2 >= 0")
    if t < 0:
        raise ValueError("step count must be non-negative")
    return math.sqrt(2.0) * (sigma2 / sigma1) ** t


def pi_alignment_bound(
    sigma_j_star: float, sigma1: float, h_aj_norm: float, c0: float, t: int
) -> float:
    """Upper bound on |x_t . a_j*| when iterating a perturbed matrix.

    ``sigma_j_star`` is the j-th eigenvalue of the unperturbed matrix,
    ``sigma1`` the top eigenvalue of the matrix actually iterated,
    ``h_aj_norm`` the norm of the perturbation applied to the j-th ideal
    eigenvector, and ``c0`` the reciprocal of the start vector's alignment
    with the iterated matrix's top eigenvector. With ``h_aj_norm == 0`` this
    reduces to the unperturbed decay c0 * (sigma_j*/sigma1)**t.

    The leak coefficient must be 1/(sigma1 - sigma_j*): unrolling the iterate
    puts t-1-t' powers of sigma_j* on the perturbation picked up at step t',
    and the t -> infinity limit |a_1 . H a_j*| / (sigma1 - sigma_j*) is not
    damped by sigma_j*, so a sigma_j*-weighted coefficient would be violated
    for small sigma_j*.
    """
    if not sigma1 > sigma_j_star >= 0:
        raise InvalidSpectrumError("need sigma1 > sigma_j_star >= 0")
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    if h_aj_norm < 0:
        raise ValueError("perturbation norm must be non-negative")
    if t < 0:
        raise ValueError("step count must be non-negative")
    decay = (sigma_j_star / sigma1) ** t
    leak = h_aj_norm / (sigma1 - sigma_j_star)
    return c0 * (decay + leak)


def random_init_threshold(d: int) -> float:
    """Alignment level 1/sqrt(1 + 2 d^3) that a uniform start vector clears
    with high probability."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return 1.0 / math.sqrt(1.0 + 2.0 * d**3)


def check_init_alignment(x0: np.ndarray, u: np.ndarray, d: int) -> tuple[float, bool]:
    """Measure |x0 . u| and compare it against :func:`random_init_threshold`."""
    x0 = np.asarray(x0, dtype=float)
    u = np.asarray(u, dtype=float)
    if x0.shape != (d,) or u.shape != (d,):
        raise DimensionMismatchError(
            f"expected two vectors of dim {d}, got {x0.shape} and {u.shape}"
        )
    alignment = float(abs(x0 @ u))
    return alignment, alignment >= random_init_threshold(d)
