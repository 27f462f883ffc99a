"""Score operators, Lagrange operators and global-optimality certificates.

For guesses ``psi_m`` and a POM ``{mu_m}`` the Bayesian average score is
``Tr(Gamma)`` with ``Gamma = sum_m W_m mu_m``.  The POM is a global maximum
iff ``Gamma`` is Hermitian, ``(Gamma - W_m) mu_m = 0`` and every
``Gamma - W_m`` is positive semidefinite.  :func:`certify` checks these
numerically and reports eigenvalue margins.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, ValidationError
from .pom import Pom, continuum_pom, sample_angles
from .symstate import (
    OverlapCoefficients,
    StateSpec,
    SymmetricState,
    evolved_single,
    evolved_symmetric,
)

DEFAULT_TOL = 1e-10


def default_gridpoints(K: int, N: int) -> int:
    return 4 * (K * N + K) + 8


class Verdict(str, enum.Enum):
    GLOBAL_MAXIMUM = "GlobalMaximum"
    GLOBAL_MINIMUM = "GlobalMinimum"
    MIXED_SIGN = "MixedSign"
    EXTREMAL = "Extremal"
    # condition (i) itself fails; not a stationary point at all
    NOT_EXTREMAL = "NotExtremal"


@dataclass(frozen=True, eq=False)
class ScoreOperators:
    W: np.ndarray  # (M, dim, dim)

    @property
    def M(self) -> int:
        return self.W.shape[0]

    @property
    def dim(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True, eq=False)
class OptimalityReport:
    gamma_hermiticity_residual: float
    extremality_residuals: list[float]
    min_eigenvalues: list[float]
    max_eigenvalues: list[float]
    score_trace: float
    verdict: Verdict
    tol: float
    gamma: np.ndarray = field(repr=False)

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "tolerance": self.tol,
            "score_trace": self.score_trace,
            "gamma_hermiticity_residual": self.gamma_hermiticity_residual,
            "extremality_residuals": list(self.extremality_residuals),
            "min_eigenvalues": list(self.min_eigenvalues),
            "max_eigenvalues": list(self.max_eigenvalues),
        }


def score_operators_closed(sym: SymmetricState, d: OverlapCoefficients, M: int) -> ScoreOperators:
    """Closed-form ``W_m`` built from the autocorrelations ``d_L``."""
    if M < 1:
        raise ValidationError("M must be >= 1")
    A = sym.as_array()
    dd = d.as_array()
    if dd.shape[0] != sym.K + 1:
        raise DimensionMismatch("overlap coefficients do not match K")
    dim = sym.dim
    W = np.zeros((M, dim, dim), dtype=complex)
    W[:] = np.diag(dd[0] * A**2)
    for L in range(1, sym.K + 1):
        band = dd[L] * A[:-L] * A[L:]
        for m in range(M):
            phase = np.exp(2j * np.pi * m * L / M)
            W[m] += np.diag(phase * band, k=L) + np.diag(np.conj(phase) * band, k=-L)
    return ScoreOperators(W)


def score_operators_quadrature(
    spec: StateSpec, sym: SymmetricState, M: int, gridpoints: int | None = None
) -> ScoreOperators:
    """``W_m`` as the periodic-trapezoid average of ``Psi(theta) |<psi_m|psi(theta)>|^2``.

    Uses only the defining integral, not the ``d_L`` expansion, so it is an
    independent check of :func:`score_operators_closed`.
    """
    if gridpoints is None:
        gridpoints = default_gridpoints(sym.K, sym.N)
    thetas = sample_angles(gridpoints)
    states = np.stack([evolved_symmetric(sym, t) for t in thetas])
    singles = np.stack([evolved_single(spec, t) for t in thetas])
    guesses = np.stack([evolved_single(spec, t) for t in sample_angles(M)])
    fid = np.abs(guesses.conj() @ singles.T) ** 2  # (M, G)
    proj = states[:, :, None] * states.conj()[:, None, :]
    W = np.einsum("mg,gij->mij", fid, proj) / gridpoints
    return ScoreOperators(W)


def lagrange_operator(W: ScoreOperators, pom: Pom) -> np.ndarray:
    if W.dim != pom.dim or W.M != pom.M:
        raise DimensionMismatch(
            f"score operators (M={W.M}, dim={W.dim}) vs POM (M={pom.M}, dim={pom.dim})"
        )
    return np.einsum("mij,mjk->ik", W.W, pom.elements())


def lagrange_closed(sym: SymmetricState, d: OverlapCoefficients, reciprocal: bool = False) -> np.ndarray:
    """Diagonal Lagrange operator of the plain (or reciprocal) SRM, ``M >= KN + 1``."""
    A = sym.as_array()
    dd = d.as_array()
    diag = dd[0] * A**2
    for L in range(1, sym.K + 1):
        band = dd[L] * A[:-L] * A[L:] * ((-1.0) ** L if reciprocal else 1.0)
        diag[:-L] += band
        diag[L:] += band
    return np.diag(diag).astype(complex)


def certify(W: ScoreOperators, pom: Pom, tol: float = DEFAULT_TOL) -> OptimalityReport:
    gamma = lagrange_operator(W, pom)
    herm = float(np.max(np.abs(gamma - gamma.conj().T)))
    gamma_h = 0.5 * (gamma + gamma.conj().T)
    ext, lo, hi = [], [], []
    for m in range(W.M):
        diff = gamma - W.W[m]
        mu = np.sqrt(pom.weights[m]) * pom.vectors[m]
        ext.append(float(np.linalg.norm(diff @ mu)))
        evals = np.linalg.eigvalsh(gamma_h - W.W[m])
        lo.append(float(evals[0]))
        hi.append(float(evals[-1]))

    if herm >= tol or max(ext) >= tol:
        verdict = Verdict.NOT_EXTREMAL
    elif min(lo) > -tol:
        verdict = Verdict.GLOBAL_MAXIMUM
    elif max(hi) < tol:
        verdict = Verdict.GLOBAL_MINIMUM
    elif any(a < -tol and b > tol for a, b in zip(lo, hi)):
        verdict = Verdict.MIXED_SIGN
    else:
        verdict = Verdict.EXTREMAL
    return OptimalityReport(
        gamma_hermiticity_residual=herm,
        extremality_residuals=ext,
        min_eigenvalues=lo,
        max_eigenvalues=hi,
        score_trace=float(np.trace(gamma).real),
        verdict=verdict,
        tol=tol,
        gamma=gamma,
    )


def max_average_score(sym: SymmetricState, d: OverlapCoefficients) -> float:
    """Optimal average fidelity ``d_0 sum A_J^2 + 2 sum_L d_L sum_J A_J A_{J+L}``."""
    A = sym.as_array()
    dd = d.as_array()
    total = dd[0] * float(np.dot(A, A))
    for L in range(1, sym.K + 1):
        total += 2 * dd[L] * float(np.dot(A[:-L], A[L:]))
    return total


def reciprocal_score(sym: SymmetricState, d: OverlapCoefficients) -> float:
    """Trace of the reciprocal Lagrange operator (alternating-sign counterpart)."""
    A = sym.as_array()
    dd = d.as_array()
    total = dd[0] * float(np.dot(A, A))
    for L in range(1, sym.K + 1):
        total += 2 * (-1) ** L * dd[L] * float(np.dot(A[:-L], A[L:]))
    return total


def average_score_quadrature(
    spec: StateSpec,
    sym: SymmetricState,
    pom: Pom,
    guesses: Sequence[float],
    gridpoints: int | None = None,
) -> float:
    """Average fidelity of an arbitrary POM with guess angles, by quadrature.

    Evaluates ``sum_m (1/2pi) int Tr(mu_m Psi(theta)) |<psi(guess_m)|psi(theta)>|^2``
    with the periodic trapezoid rule, exact once ``gridpoints > KN + K``.
    """
    guesses = np.asarray(guesses, dtype=float).reshape(-1)
    if guesses.shape[0] != pom.M:
        raise LengthMismatch(f"{guesses.shape[0]} guesses for a POM with {pom.M} outcomes")
    if pom.dim != sym.dim:
        raise DimensionMismatch("POM dimension does not match the ladder space")
    if gridpoints is None:
        gridpoints = default_gridpoints(sym.K, sym.N)
    thetas = sample_angles(gridpoints)
    states = np.stack([evolved_symmetric(sym, t) for t in thetas])  # (G, dim)
    probs = pom.weights[None, :] * np.abs(states @ pom.vectors.conj().T) ** 2  # (G, M)
    singles = np.stack([evolved_single(spec, t) for t in thetas])
    guess_states = np.stack([evolved_single(spec, g) for g in guesses])
    fid = np.abs(singles @ guess_states.conj().T) ** 2  # (G, M)
    return float(np.sum(probs * fid) / gridpoints)


def continuum_average_score(spec: StateSpec, sym: SymmetricState, gridpoints: int | None = None) -> float:
    """Score of the continuous covariant POM, discretized on ``gridpoints`` outcomes."""
    if gridpoints is None:
        gridpoints = default_gridpoints(sym.K, sym.N)
    pom = continuum_pom(sym.dim, gridpoints)
    return average_score_quadrature(spec, sym, pom, sample_angles(gridpoints), gridpoints)
