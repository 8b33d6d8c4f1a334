"""Sequential top-K eigenvector extraction by matrix deflation.

Each step asks the inexact sub-routine (power iteration) for an approximate
top eigenvector of the current matrix, then removes that direction:

    sigma_{k+1} = sigma_k - (v_k . sigma_k v_k) v_k v_k^T.

The run keeps a full diagnostic trace: alongside each output ``v_k`` it
records the oracle's exact top eigenpair of ``sigma_k`` and the sub-routine
error vector, which downstream modules compare against the ideal (exact
sub-routine) trace.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGapError, DimensionMismatchError, InvalidSpectrumError
from .linalg import (
    DEFAULT_JACOBI_TOL,
    RandomSource,
    Spectrum,
    SymMatrix,
    frobenius_norm,
    jacobi_eigendecomposition,
    sample_unit_sphere,
)
from .powerit import power_iterate

__all__ = [
    "DeflationRun",
    "GroundTruthTrace",
    "aligned_top_eigenvector",
    "deflate_step",
    "ideal_deflation",
    "run_inexact_deflation",
]

_UNIT_TOL = 1e-10
_GAP_TOL = 1e-12


def deflate_step(sigma_k: SymMatrix, v: np.ndarray) -> SymMatrix:
    """One deflation update: subtract the Rayleigh-weighted projector of ``v``.

    The result is re-symmetrized by averaging with its transpose so roundoff
    cannot accumulate asymmetry over long runs.
    """
    # contiguous copy: BLAS kernels round differently on strided views, which
    # would break bitwise recomputability of stored traces
    v = np.ascontiguousarray(v, dtype=float)
    if v.shape != (sigma_k.dim,):
        raise DimensionMismatchError(f"vector shape {v.shape} incompatible with dim {sigma_k.dim}")
    if abs(np.linalg.norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError("deflation vector must have unit norm")
    a = sigma_k.array
    rayleigh = float(v @ (a @ v))
    b = a - rayleigh * np.outer(v, v)
    return SymMatrix((b + b.T) / 2.0)


@dataclass(frozen=True)
class GroundTruthTrace:
    """The ideal deflation sequence: what exact sub-routine steps would produce.

    ``deflated[k-1]`` is the k-th ideal matrix (so ``deflated[0]`` is the
    original matrix and ``deflated[K]`` the matrix after K exact steps); its
    top eigenpair is ``spectrum.eigenvector(k-1)`` / ``eigenvalues[k-1]``.
    """

    spectrum: Spectrum
    K: int
    deflated: tuple[SymMatrix, ...]

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def ideal_matrix(self, k: int) -> SymMatrix:
        """Ideal deflated matrix at step ``k`` (1-based, up to K+1)."""
        return self.deflated[k - 1]

    def ideal_vector(self, k: int) -> np.ndarray:
        return self.spectrum.eigenvector(k - 1)

    def ideal_value(self, k: int) -> float:
        return float(self.spectrum.eigenvalues[k - 1])


def ideal_deflation(spectrum: Spectrum, K: int) -> GroundTruthTrace:
    """Build the ideal deflation sequence and cross-check its closed form.

    The recursion (deflate with the exact eigenvector at every step) and the
    closed form (drop one eigencomponent per step) must agree; disagreement
    beyond 1e-10 Frobenius indicates a broken spectrum and raises.
    """
    d = spectrum.dim
    if not 1 <= K <= d:
        raise ValueError(f"K must lie in [1, {d}], got {K}")
    lam = spectrum.eigenvalues
    basis = spectrum.basis
    mats = []
    current = SymMatrix((basis * lam) @ basis.T)
    for k in range(K + 1):
        tail = basis[:, k:] * lam[k:]
        closed = SymMatrix(tail @ basis[:, k:].T) if k < d else SymMatrix(np.zeros((d, d)))
        gap = frobenius_norm(SymMatrix(current.array - closed.array))
        if gap > 1e-10:
            raise InvalidSpectrumError(
                f"recursive and closed-form deflation disagree at step {k + 1} ({gap:.3e})"
            )
        mats.append(closed)
        if k < K:
            current = deflate_step(current, basis[:, k])
    return GroundTruthTrace(spectrum=spectrum, K=K, deflated=tuple(mats))


def aligned_top_eigenvector(
    sigma_k: SymMatrix,
    u_star_k: np.ndarray,
    *,
    spectrum: Spectrum | None = None,
    jacobi_tol: float = DEFAULT_JACOBI_TOL,
) -> tuple[np.ndarray, float]:
    """Oracle top eigenvector of ``sigma_k`` with its sign fixed by ``u_star_k``.

    Both signs of an eigenvector are valid; the returned one satisfies
    u . u_star_k >= 0. An exactly orthogonal pair is accepted with a warning
    (either sign is as good). A top-gap below 1e-12 means the "top
    eigenvector" is not well defined and raises :class:`DegenerateGapError`.
    """
    u_star_k = np.asarray(u_star_k, dtype=float)
    if u_star_k.shape != (sigma_k.dim,):
        raise DimensionMismatchError("reference vector dimension mismatch")
    if abs(np.linalg.norm(u_star_k) - 1.0) > _UNIT_TOL:
        raise ValueError("reference vector must have unit norm")
    spec = spectrum if spectrum is not None else jacobi_eigendecomposition(sigma_k, jacobi_tol)
    if spec.dim >= 2 and spec.eigenvalues[0] - spec.eigenvalues[1] < _GAP_TOL:
        raise DegenerateGapError(
            f"top two eigenvalues within {_GAP_TOL:g}; top eigenvector is ambiguous"
        )
    u = spec.eigenvector(0)
    dot = float(u @ u_star_k)
    if dot == 0.0:
        warnings.warn("alignment is ambiguous: candidate is orthogonal to the reference",
                      stacklevel=2)
    if dot < 0:
        u = -u
    return u, float(spec.eigenvalues[0])


@dataclass(frozen=True)
class DeflationRun:
    """Full trace of an inexact deflation run.

    Per step k (columns of the (d, K) arrays, 1-based step index):

    * ``components[:, k-1]`` - sub-routine output v_k, sign-matched to the
      exact top eigenvector of sigma_k when the oracle ran (both signs are
      equally valid outputs; the deflation update is sign-invariant).
    * ``exact_tops[:, k-1]`` - oracle top eigenvector u_k of sigma_k, sign
      fixed against the ideal eigenvector (diagnostic; the algorithm itself
      never consults the oracle).
    * ``sub_errors[:, k-1]`` - v_k - u_k.
    * ``top_eigenvalues[k-1]`` - top eigenvalue of sigma_k (oracle value
      when available, otherwise the Rayleigh quotient of v_k).
    * ``init_alignments[k-1]`` - |x_{0,k} . u_k|.

    ``matrices`` holds sigma_1 .. sigma_{K+1} when retained.
    """

    d: int
    K: int
    t: int
    seed: int
    seed_path: tuple[int, ...]
    components: np.ndarray
    top_eigenvalues: np.ndarray
    inits: np.ndarray
    matrices: tuple[SymMatrix, ...] | None
    exact_tops: np.ndarray | None
    sub_errors: np.ndarray | None
    init_alignments: np.ndarray | None
    assumption_ok: bool | None

    def __post_init__(self):
        for name in ("components", "top_eigenvalues", "inits",
                     "exact_tops", "sub_errors", "init_alignments"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @property
    def has_oracle_trace(self) -> bool:
        return self.exact_tops is not None

    def component(self, k: int) -> np.ndarray:
        """Output vector at step ``k`` (1-based)."""
        return self.components[:, k - 1]

    def matrix(self, k: int) -> SymMatrix:
        if self.matrices is None:
            raise ValueError("matrices were not retained for this run")
        return self.matrices[k - 1]


def _check_assumption(spectrum: Spectrum) -> bool:
    lam = spectrum.eigenvalues
    if lam[-1] <= 0 or np.any(np.diff(lam) >= -_GAP_TOL):
        raise InvalidSpectrumError(
            "matrix must have strictly decreasing positive eigenvalues"
        )
    if abs(lam[0] - 1.0) > 1e-12:
        warnings.warn("leading eigenvalue is not 1; proceeding without rescaling", stacklevel=3)
        return False
    return True


def run_inexact_deflation(
    sigma: SymMatrix,
    K: int,
    t: int,
    rng: RandomSource,
    *,
    spectrum: Spectrum | None = None,
    with_oracle: bool = True,
    require_strict_decay: bool = True,
    keep_matrices: bool = True,
    jacobi_tol: float = DEFAULT_JACOBI_TOL,
) -> DeflationRun:
    """Extract K approximate top eigenvectors with t power-iteration steps each.

    Every step draws its start vector from an independent substream derived
    from (seed, k), runs the sub-routine, deflates, and (when ``with_oracle``)
    records the exact top eigenpair of the current matrix for diagnostics.
    The runtime path never feeds oracle information back into the algorithm;
    the only oracle-dependent choice is the reported sign of the output
    vector, and the deflation update is sign-invariant.

    ``require_strict_decay=False`` skips the strict-eigenvalue-decay check for
    matrices (such as graph Laplacians) that may carry ties; step-level
    degeneracies then surface as errors only where they matter.
    """
    d = sigma.dim
    if not 1 <= K <= d:
        raise ValueError(f"K must lie in [1, {d}], got {K}")
    if t < 1:
        raise ValueError("t must be >= 1")

    assumption_ok: bool | None = None
    if spectrum is None and (with_oracle or require_strict_decay):
        spectrum = jacobi_eigendecomposition(sigma, jacobi_tol)
    if spectrum is not None:
        if spectrum.dim != d:
            raise DimensionMismatchError("spectrum dimension does not match the matrix")
        if require_strict_decay:
            assumption_ok = _check_assumption(spectrum)

    components = np.empty((d, K))
    lambdas = np.empty(K)
    inits = np.empty((d, K))
    matrices: list[SymMatrix] | None = [sigma] if keep_matrices else None
    exact_tops = np.empty((d, K)) if with_oracle else None
    sub_errors = np.empty((d, K)) if with_oracle else None
    alignments = np.empty(K) if with_oracle else None

    current = sigma
    for k in range(1, K + 1):
        x0 = sample_unit_sphere(d, rng.substream(k))
        result = power_iterate(current, x0, t)
        v = result.x_t
        if with_oracle:
            assert spectrum is not None
            step_spec = jacobi_eigendecomposition(current, jacobi_tol)
            u, lam = aligned_top_eigenvector(
                current, spectrum.eigenvector(k - 1), spectrum=step_spec
            )
            if float(v @ u) < 0:
                v = -v
            exact_tops[:, k - 1] = u
            sub_errors[:, k - 1] = v - u
            alignments[k - 1] = abs(float(x0 @ u))
            lambdas[k - 1] = lam
        else:
            lambdas[k - 1] = result.rayleigh
        components[:, k - 1] = v
        inits[:, k - 1] = x0
        current = deflate_step(current, v)
        if matrices is not None:
            matrices.append(current)

    return DeflationRun(
        d=d,
        K=K,
        t=t,
        seed=rng.seed,
        seed_path=rng.path,
        components=components,
        top_eigenvalues=lambdas,
        inits=inits,
        matrices=tuple(matrices) if matrices is not None else None,
        exact_tops=exact_tops,
        sub_errors=sub_errors,
        init_alignments=alignments,
        assumption_ok=assumption_ok,
    )
