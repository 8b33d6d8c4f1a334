"""Dense symmetric linear algebra and seeded generators.

Everything downstream measures errors against the eigendecomposition oracle
implemented here, so this module favours unconditional stability over speed:
the oracle is a Jacobi rotation scheme (round-robin ordering, all rotations of
a sweep visit every off-diagonal pair exactly once), adequate for the
dimensions this package targets (d up to a few hundred).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidSpectrumError,
    JacobiConvergenceError,
)

__all__ = [
    "DEFAULT_JACOBI_SWEEPS",
    "DEFAULT_JACOBI_TOL",
    "ExplicitSpectrum",
    "ExponentialSpectrum",
    "PowerLawSpectrum",
    "RandomSource",
    "Spectrum",
    "SymMatrix",
    "build_test_sigma",
    "frobenius_norm",
    "jacobi_eigendecomposition",
    "mat_vec",
    "random_orthogonal_basis",
    "sample_unit_sphere",
    "spectral_norm",
    "spectrum_eigenvalues",
]

DEFAULT_JACOBI_TOL = 1e-12
DEFAULT_JACOBI_SWEEPS = 100


class SymMatrix:
    """Real symmetric matrix with exactly mirrored triangles.

    The upper triangle is the source of truth: construction mirrors it onto
    the lower one, so ``array[i, j] == array[j, i]`` holds bitwise. Inputs
    that are asymmetric beyond roundoff are rejected rather than silently
    symmetrized. The stored array is read-only.
    """

    __slots__ = ("array",)

    def __init__(self, array) -> None:
        a = np.array(array, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DimensionMismatchError(f"expected a nonempty square matrix, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ValueError("matrix entries must be finite")
        scale = max(1.0, float(np.abs(a).max()))
        skew = float(np.abs(a - a.T).max())
        if skew > 1e-8 * scale:
            raise ValueError(f"matrix is not symmetric (max asymmetry {skew:.3e})")
        a = np.triu(a) + np.triu(a, 1).T
        a.setflags(write=False)
        self.array = a

    @property
    def dim(self) -> int:
        return self.array.shape[0]

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order plus the matching orthonormal basis.

    ``basis[:, j]`` is the unit eigenvector for ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.eigenvalues, dtype=float)
        u = np.asarray(self.basis, dtype=float)
        if w.ndim != 1 or u.shape != (w.size, w.size):
            raise DimensionMismatchError(
                f"eigenvalue/basis shapes do not match: {w.shape} vs {u.shape}"
            )
        if np.any(np.diff(w) > 0):
            raise InvalidSpectrumError("eigenvalues must be sorted non-increasing")
        w = w.copy()
        u = u.copy()
        w.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "basis", u)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def eigenvector(self, j: int) -> np.ndarray:
        """Column ``j`` (0-based) of the basis."""
        return self.basis[:, j]


class RandomSource:
    """Deterministic random stream (counter-based Philox keyed by seed + path).

    The same (seed, path) pair produces the identical stream on every
    platform. A source is stateful and should stay confined to one logical
    task; derive independent streams for per-step or parallel use with
    :meth:`substream`.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed: int, path: tuple[int, ...] = ()) -> None:
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = seed
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(seed, spawn_key=self.path)
        self._gen = np.random.Generator(np.random.Philox(ss))

    def substream(self, *path: int) -> "RandomSource":
        """Independent stream derived from this source's identity."""
        return RandomSource(self.seed, self.path + path)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def normal(self, *shape: int) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, path={self.path})"


def mat_vec(m: SymMatrix, x: np.ndarray) -> np.ndarray:
    """Dense matrix-vector product."""
    x = np.asarray(x, dtype=float)
    if x.shape != (m.dim,):
        raise DimensionMismatchError(f"vector of shape {x.shape} incompatible with dim {m.dim}")
    return m.array @ x


def frobenius_norm(m: SymMatrix) -> float:
    return float(np.sqrt((m.array * m.array).sum()))


def spectral_norm(m: SymMatrix, tol: float = DEFAULT_JACOBI_TOL) -> float:
    """Largest absolute eigenvalue, computed with the eigendecomposition oracle."""
    w = _jacobi_eigenvalues(m, tol, DEFAULT_JACOBI_SWEEPS, accumulate_basis=False)[0]
    return float(np.abs(w).max())


@lru_cache(maxsize=None)
def _round_robin_pairs(d: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Circle-method tournament: d-1 rounds of disjoint index pairs covering
    # every (p, q) with p < q exactly once per sweep.
    players = list(range(d)) + ([-1] if d % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigendecomposition(
    m: SymMatrix,
    tol: float = DEFAULT_JACOBI_TOL,
    max_sweeps: int = DEFAULT_JACOBI_SWEEPS,
) -> Spectrum:
    """Full eigendecomposition by plane rotations: the exact-solver oracle.

    Sweeps run in round-robin order; rotations within a round act on disjoint
    index pairs, so a round is one exact orthogonal similarity transform.
    Convergence is declared when the off-diagonal Frobenius mass drops below
    ``tol * ||m||_F``. Exhausting ``max_sweeps`` raises
    :class:`JacobiConvergenceError` rather than returning a truncated result.

    Eigenvalues are returned in descending order with basis columns permuted
    consistently; exact ties keep their pre-sort (rotation) order.
    """
    w, v = _jacobi_eigenvalues(m, tol, max_sweeps, accumulate_basis=True)
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])


def _jacobi_eigenvalues(m, tol, max_sweeps, *, accumulate_basis):
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = m.array.copy()
    d = m.dim
    v = np.eye(d) if accumulate_basis else None
    if d == 1:
        return np.diag(a).copy(), v
    fro = float(np.sqrt((a * a).sum()))
    if fro == 0.0:
        return np.zeros(d), v
    # Rotations below this size cannot push the off-diagonal mass back above
    # the convergence target, so skipping them is safe.
    skip = tol * fro / (10.0 * d * d)
    target = tol * fro
    for _sweep in range(max_sweeps):
        off = float(np.sqrt(2.0 * (np.triu(a, 1) ** 2).sum()))
        if off <= target:
            return np.diag(a).copy(), v
        for ps, qs in _round_robin_pairs(d):
            apq = a[ps, qs]
            mask = np.abs(apq) > skip
            if not mask.any():
                continue
            app = a[ps, ps]
            aqq = a[qs, qs]
            tau = np.where(mask, (aqq - app) / np.where(mask, 2.0 * apq, 1.0), 0.0)
            root = np.sqrt(1.0 + tau * tau)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + root)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c = np.where(mask, c, 1.0)
            s = np.where(mask, s, 0.0)
            col_p = a[:, ps]
            col_q = a[:, qs]
            a[:, ps] = col_p * c - col_q * s
            a[:, qs] = col_p * s + col_q * c
            row_p = a[ps, :]
            row_q = a[qs, :]
            a[ps, :] = c[:, None] * row_p - s[:, None] * row_q
            a[qs, :] = s[:, None] * row_p + c[:, None] * row_q
            a[ps[mask], qs[mask]] = 0.0
            a[qs[mask], ps[mask]] = 0.0
            if v is not None:
                vp = v[:, ps]
                vq = v[:, qs]
                v[:, ps] = vp * c - vq * s
                v[:, qs] = vp * s + vq * c
    raise JacobiConvergenceError(
        f"off-diagonal mass still above {tol:g}*||m||_F after {max_sweeps} sweeps"
    )


def sample_unit_sphere(d: int, rng: RandomSource) -> np.ndarray:
    """Uniform draw from the unit sphere (normalized i.i.d. Gaussian vector)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        x = rng.normal(d)
        n = float(np.linalg.norm(x))
        if n > 1e-6:
            return x / n


def random_orthogonal_basis(d: int, rng: RandomSource) -> np.ndarray:
    """Orthonormal d x d basis from Householder QR of a Gaussian draw.

    Signs are fixed so the R factor has a positive diagonal, which makes the
    output a deterministic function of the stream.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    while True:
        g = rng.normal(d, d)
        q, r = np.linalg.qr(g)
        diag = np.diag(r)
        if np.abs(diag).min() < 1e-12:
            continue
        q = q * np.where(diag >= 0, 1.0, -1.0)
        if np.abs(q.T @ q - np.eye(d)).max() <= 1e-12:
            return q


@dataclass(frozen=True)
class PowerLawSpectrum:
    """Eigenvalues 1, 2**-gamma, 3**-gamma, ..."""

    gamma: float = 1.0


@dataclass(frozen=True)
class ExponentialSpectrum:
    """Eigenvalues 1, rho, rho**2, ... with 0 < rho < 1."""

    rho: float = 0.8


@dataclass(frozen=True)
class ExplicitSpectrum:
    """A caller-supplied strictly decreasing positive eigenvalue list."""

    values: tuple[float, ...]


SpectrumKind = PowerLawSpectrum | ExponentialSpectrum | ExplicitSpectrum


def spectrum_eigenvalues(kind: SpectrumKind, d: int) -> np.ndarray:
    """Materialize a spectrum kind as a strictly decreasing positive array."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if isinstance(kind, PowerLawSpectrum):
        if kind.gamma <= 0:
            raise InvalidSpectrumError("power-law exponent must be positive")
        lam = np.arange(1, d + 1, dtype=float) ** (-kind.gamma)
    elif isinstance(kind, ExponentialSpectrum):
        if not 0.0 < kind.rho < 1.0:
            raise InvalidSpectrumError("decay rate must lie in (0, 1)")
        lam = kind.rho ** np.arange(d, dtype=float)
    elif isinstance(kind, ExplicitSpectrum):
        lam = np.asarray(kind.values, dtype=float)
        if lam.shape != (d,):
            raise DimensionMismatchError(f"expected {d} eigenvalues, got {lam.shape}")
    else:
        raise TypeError(f"unknown spectrum kind: {kind!r}")
    if lam[-1] <= 0 or np.any(np.diff(lam) >= 0):
        raise InvalidSpectrumError("eigenvalues must be strictly decreasing and positive")
    if abs(lam[0] - 1.0) > 1e-12:
        warnings.warn(
            "leading eigenvalue is not 1; proceeding without rescaling",
            stacklevel=2,
        )
    return lam


def build_test_sigma(d: int, kind: SpectrumKind, basis: np.ndarray) -> tuple[SymMatrix, Spectrum]:
    """Assemble a test matrix with a known spectrum: sum_j lambda_j u_j u_j^T.

    The returned :class:`Spectrum` is exact by construction (it is the input
    eigenvalues and basis, not a re-decomposition).
    """
    basis = np.asarray(basis, dtype=float)
    if basis.shape != (d, d):
        raise DimensionMismatchError(f"basis shape {basis.shape} incompatible with d={d}")
    if np.abs(basis.T @ basis - np.eye(d)).max() > 1e-10:
        raise ValueError("basis columns are not orthonormal")
    lam = spectrum_eigenvalues(kind, d)
    sigma = SymMatrix((basis * lam) @ basis.T)
    return sigma, Spectrum(lam, basis)
