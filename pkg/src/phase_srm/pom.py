"""Square-root measurements on the ladder space.

Vectors are stored as rows: ``Pom.vectors[m]`` is ``|mu_m>`` written in the
``|J>`` basis, and the POM elements are ``weights[m] * |mu_m><mu_m|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ValidationError, ZeroAmplitude
from .symstate import SymmetricState

SUPPORT_RTOL = 1e-12
AMPLITUDE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Pom:
    vectors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != vecs.shape[0]:
            raise ValidationError("one weight per measurement vector")
        if np.any(w <= 0):
            raise ValidationError("weights must be positive")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def M(self) -> int:
        return self.vectors.shape[0]

    def elements(self) -> np.ndarray:
        """Stack of ``M`` POM elements, shape ``(M, dim, dim)``."""
        v = self.vectors
        return self.weights[:, None, None] * v[:, :, None] * v.conj()[:, None, :]

    def completeness(self) -> np.ndarray:
        return self.elements().sum(axis=0)

    def identity_deviation(self) -> float:
        return float(np.max(np.abs(self.completeness() - np.eye(self.dim))))


@dataclass(frozen=True, eq=False)
class SampleFamily:
    """States ``|Psi_m>`` for the guesses ``theta_m = 2 pi m / M``."""

    vectors: np.ndarray

    @property
    def M(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def gram_operator(self) -> np.ndarray:
        v = self.vectors
        return v.T @ v.conj()


def _fourier_phases(M: int, dim: int) -> np.ndarray:
    m = np.arange(M)[:, None]
    J = np.arange(dim)[None, :]
    return np.exp(-2j * np.pi * m * J / M)


def sample_angles(M: int) -> np.ndarray:
    return 2 * np.pi * np.arange(M) / M


def sample_states(sym: SymmetricState, M: int) -> SampleFamily:
    if M < 1:
        raise ValidationError("M must be >= 1")
    return SampleFamily(sym.as_array()[None, :] * _fourier_phases(M, sym.dim))


def inverse_sqrt_psd(H: np.ndarray, rtol: float = SUPPORT_RTOL) -> np.ndarray:
    """Pseudo-inverse square root of a Hermitian PSD matrix.

    Eigenvalues at or below ``rtol * max_eigenvalue`` are treated as exact
    zeros, so the result acts as the inverse root on the support only.
    """
    evals, evecs = np.linalg.eigh(H)
    top = evals.max() if evals.size else 0.0
    inv = np.zeros_like(evals)
    keep = evals > rtol * top
    inv[keep] = 1.0 / np.sqrt(evals[keep])
    return (evecs * inv) @ evecs.conj().T


def srm(family: SampleFamily, rtol: float = SUPPORT_RTOL) -> Pom:
    """Square-root measurement ``|mu_m> = Psi^{-1/2} |Psi_m>``."""
    root = inverse_sqrt_psd(family.gram_operator(), rtol)
    return Pom(family.vectors @ root.T, np.ones(family.M))


def srm_closed(dim: int, M: int) -> Pom:
    """Fourier-vector SRM valid when ``M >= dim`` and every ``A_J > 0``."""
    return Pom(_fourier_phases(M, dim) / np.sqrt(M), np.ones(M))


def orthogonality_lemma_check(M: int, n: int) -> complex:
    m = np.arange(M)
    return complex(np.exp(2j * np.pi * m * n / M).sum())


def _require_positive(sym: SymmetricState):
    A = sym.as_array()
    if np.any(A <= AMPLITUDE_TOL):
        bad = [int(j) for j in np.flatnonzero(A <= AMPLITUDE_TOL)]
        raise ZeroAmplitude(f"ladder amplitudes vanish at J = {bad}")


def reciprocal_states(sym: SymmetricState, M: int) -> SampleFamily:
    """Unnormalized states orthogonal to each sample state.

    Component ``J`` of vector ``m`` is ``binom(KN, J) (-1)^J e^{-2 pi i m J/M} / A_J``.
    """
    if M < 1:
        raise ValidationError("M must be >= 1")
    _require_positive(sym)
    D = sym.dim - 1
    J = np.arange(sym.dim)
    coeff = np.array([comb(D, j) for j in J], dtype=float) * (-1.0) ** J / sym.as_array()
    return SampleFamily(coeff[None, :] * _fourier_phases(M, sym.dim))


def srm_reciprocal(sym: SymmetricState, M: int) -> Pom:
    """SRM discriminating the reciprocal states; needs ``M >= KN + 1``.

    Returned in the closed form ``(-1)^J e^{-2 pi i m J/M} / sqrt(M)``; the
    generic route ``srm(reciprocal_states(...))`` agrees with it whenever the
    reciprocal Gram operator is well conditioned.
    """
    if M < sym.dim:
        raise ValidationError(f"reciprocal SRM needs M >= {sym.dim}, got {M}")
    _require_positive(sym)
    signs = (-1.0) ** np.arange(sym.dim)
    return Pom(signs[None, :] * _fourier_phases(M, sym.dim) / np.sqrt(M), np.ones(M))


def continuum_vector(dim: int, phi: float) -> np.ndarray:
    """Unnormalized continuum measurement vector with components ``e^{-i phi J}``."""
    return np.exp(-1j * phi * np.arange(dim))


def continuum_pom(dim: int, gridpoints: int) -> Pom:
    """Periodic-trapezoid discretization of ``|mu(phi)><mu(phi)| dphi / 2pi``."""
    if gridpoints < 1:
        raise ValidationError("gridpoints must be >= 1")
    phis = sample_angles(gridpoints)
    vecs = np.stack([continuum_vector(dim, p) for p in phis])
    return Pom(vecs, np.full(gridpoints, 1.0 / gridpoints))


def continuum_identity_check(sym: SymmetricState, gridpoints: int) -> float:
    """Max-norm deviation of the discretized continuum POM from the identity.

    The integrand is a trigonometric polynomial of degree ``KN``, so the rule
    is exact once ``gridpoints > KN`` and aliases below that.
    """
    return continuum_pom(sym.dim, gridpoints).identity_deviation()


def phase_normalized(vectors: np.ndarray) -> np.ndarray:
    """Rotate each row so its first nonzero component is real nonnegative."""
    out = np.array(vectors, dtype=complex, copy=True)
    for row in out:
        nz = np.flatnonzero(np.abs(row) > 1e-14)
        if nz.size:
            lead = row[nz[0]]
            row *= np.conj(lead) / abs(lead)
    return out
