"""Measured error-propagation quantities and gated inequality checks.

Everything here is read-only analysis of a finished run against its ideal
trace. Alignment profiles are always taken against the *original* eigenbasis
(the ideal directions), not per-step oracles, because that is what the
figure traces plot.

Inequality checks return a three-valued verdict (holds / violated / skipped)
so property tests never silently count vacuous cases as passes. Comparisons
carry a 1e-10 absolute slack: the bounds have at least O(1) analytic slack at
the dimensions this package targets, so roundoff cannot flip a genuine
verdict, while measured quantities never sit more than ~1e-13 from truth.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .deflate import DeflationRun, GroundTruthTrace, aligned_top_eigenvector
from .errors import DegenerateGapError, DimensionMismatchError
from .linalg import (
    DEFAULT_JACOBI_TOL,
    SymMatrix,
    jacobi_eigendecomposition,
    spectral_norm,
)

__all__ = [
    "CHECK_SLACK",
    "InequalityCheck",
    "StepDiagnostics",
    "Verdict",
    "alignment_lower_bound_check",
    "diagnose_run",
    "eigvec_inner_identity_check",
    "matrix_gap_recurrence_check",
]

CHECK_SLACK = 1e-10


class Verdict(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class InequalityCheck:
    verdict: Verdict
    lhs: float | None = None
    rhs: float | None = None


@dataclass(frozen=True)
class StepDiagnostics:
    """Every measured quantity for one deflation step (1-based index ``k``).

    * ``sub_err`` - size of the sub-routine error at this step.
    * ``matrix_gap_fro`` / ``matrix_gap_spec`` - Frobenius / spectral norm of
      the gap between the actual and ideal deflated matrices.
    * ``output_err`` - distance of the output vector from the ideal
      eigenvector; ``drift`` - distance of the running top eigenvector from
      the ideal one. The triangle inequality output_err <= sub_err + drift
      holds by construction and is asserted.
    * ``directional_gaps[j-1]`` - norm of the matrix gap applied to the j-th
      ideal eigenvector; ``output_alignments`` / ``top_alignments`` - absolute
      inner products of the output / running top eigenvector with every ideal
      eigenvector; ``inner_gap`` - |u_k . gap . ideal_k|.
    """

    k: int
    sub_err: float
    matrix_gap_fro: float
    matrix_gap_spec: float
    output_err: float
    drift: float
    directional_gaps: np.ndarray
    output_alignments: np.ndarray
    top_alignments: np.ndarray
    inner_gap: float


def diagnose_run(
    run: DeflationRun,
    truth: GroundTruthTrace,
    *,
    jacobi_tol: float = DEFAULT_JACOBI_TOL,
) -> list[StepDiagnostics]:
    """Compute the full per-step diagnostic table for an oracle-enabled run."""
    if not run.has_oracle_trace:
        raise ValueError("diagnostics need a run recorded with the oracle enabled")
    if run.matrices is None:
        raise ValueError("diagnostics need the run's matrix trace")
    if run.d != truth.dim or run.K != truth.K:
        raise DimensionMismatchError("run and ideal trace do not match")
    basis = truth.spectrum.basis
    out = []
    for k in range(1, run.K + 1):
        gap = SymMatrix(run.matrix(k).array - truth.ideal_matrix(k).array)
        v = run.components[:, k - 1]
        u = run.exact_tops[:, k - 1]
        u_star = truth.ideal_vector(k)
        sub_err = float(np.linalg.norm(run.sub_errors[:, k - 1]))
        output_err = float(np.linalg.norm(v - u_star))
        drift = float(np.linalg.norm(u - u_star))
        if output_err > sub_err + drift + 1e-12:
            raise AssertionError("triangle decomposition violated; diagnostics are inconsistent")
        out.append(
            StepDiagnostics(
                k=k,
                sub_err=sub_err,
                matrix_gap_fro=float(np.linalg.norm(gap.array)),
                matrix_gap_spec=spectral_norm(gap, jacobi_tol),
                output_err=output_err,
                drift=drift,
                directional_gaps=np.linalg.norm(gap.array @ basis, axis=0),
                output_alignments=np.abs(basis.T @ v),
                top_alignments=np.abs(basis.T @ u),
                inner_gap=float(abs(u @ (gap.array @ u_star))),
            )
        )
    return out


def matrix_gap_recurrence_check(
    diags: list[StepDiagnostics], ideal_eigenvalues
) -> list[InequalityCheck]:
    """One-step growth law of the matrix gap.

    For each step k with the next step available, checks

        gap_fro(k+1) <= 3 gap_fro(k) + 5 lam_k sub_err(k) + 2 lam_k drift(k)

    provided the sub-routine error is at most 1/6 (steps above that are
    reported as skipped, not failed).
    """
    lam = np.asarray(ideal_eigenvalues, dtype=float)
    checks = []
    for i in range(len(diags) - 1):
        cur, nxt = diags[i], diags[i + 1]
        if cur.sub_err > 1.0 / 6.0:
            checks.append(InequalityCheck(Verdict.SKIPPED))
            continue
        lam_k = float(lam[cur.k - 1])
        rhs = 3.0 * cur.matrix_gap_fro + 5.0 * lam_k * cur.sub_err + 2.0 * lam_k * cur.drift
        verdict = Verdict.HOLDS if nxt.matrix_gap_fro <= rhs + CHECK_SLACK else Verdict.VIOLATED
        checks.append(InequalityCheck(verdict, lhs=nxt.matrix_gap_fro, rhs=rhs))
    return checks


def eigvec_inner_identity_check(
    m: SymMatrix,
    m_star: SymMatrix,
    i: int,
    j: int,
    *,
    jacobi_tol: float = DEFAULT_JACOBI_TOL,
) -> tuple[float, float, float]:
    """Exact identity a_i . a_j* = (a_i . H a_j*) / (sigma_i - sigma_j*).

    ``i`` and ``j`` are 0-based eigenvector indices into the perturbed and
    unperturbed matrices respectively; H is their difference. Eigenvalue
    pairs closer than 1e-8 are degenerate for this purpose and raise.
    Returns (lhs, rhs, relative error).
    """
    if m.dim != m_star.dim:
        raise DimensionMismatchError("matrices must have equal dimension")
    spec = jacobi_eigendecomposition(m, jacobi_tol)
    spec_star = jacobi_eigendecomposition(m_star, jacobi_tol)
    sigma_i = float(spec.eigenvalues[i])
    sigma_j = float(spec_star.eigenvalues[j])
    if abs(sigma_i - sigma_j) < 1e-8:
        raise DegenerateGapError("eigenvalue pair is degenerate; the identity divides by it")
    a_i = spec.eigenvector(i)
    a_j = spec_star.eigenvector(j)
    h = m.array - m_star.array
    lhs = float(a_i @ a_j)
    rhs = float(a_i @ (h @ a_j)) / (sigma_i - sigma_j)
    rel_err = abs(lhs - rhs) / max(1e-12, abs(lhs))
    return lhs, rhs, rel_err


def alignment_lower_bound_check(
    sigma_k: SymMatrix,
    truth: GroundTruthTrace,
    k: int,
    *,
    jacobi_tol: float = DEFAULT_JACOBI_TOL,
) -> InequalityCheck:
    """Alignment floor for the running top eigenvector.

    When the matrix gap is at most an eighth of the ideal eigenvalue, the
    squared alignment with the ideal eigenvector is bounded below by one
    minus a gap term minus the leaked alignment onto later eigenvectors.
    """
    lam_k = truth.ideal_value(k)
    gap = SymMatrix(sigma_k.array - truth.ideal_matrix(k).array)
    gap_fro = float(np.linalg.norm(gap.array))
    if gap_fro > lam_k / 8.0:
        return InequalityCheck(Verdict.SKIPPED)
    spec = jacobi_eigendecomposition(sigma_k, jacobi_tol)
    u, _ = aligned_top_eigenvector(sigma_k, truth.ideal_vector(k), spectrum=spec)
    basis = truth.spectrum.basis
    lhs = float(u @ truth.ideal_vector(k)) ** 2
    later = basis[:, k:].T @ u
    rhs = 1.0 - 2.4 / lam_k**2 * gap_fro**2 - float(later @ later)
    verdict = Verdict.HOLDS if lhs >= rhs - CHECK_SLACK else Verdict.VIOLATED
    return InequalityCheck(verdict, lhs=lhs, rhs=rhs)
