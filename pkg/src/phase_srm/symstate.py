"""Single-copy states, phase evolution and the N-copy ladder compression.

A single system has basis ``|0>, ..., |K>`` labelled by the eigenvalue of the
generator.  ``N`` identical copies live in the symmetric subspace, and since
the evolution only depends on the total eigenvalue ``J = sum_k k n_k`` the
state further collapses onto the ``K*N + 1`` ladder vectors ``|J>`` with
nonnegative amplitudes ``A_J``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, exp, lgamma, log
from typing import Iterator, Sequence

import numpy as np

from .errors import EmptySpec, Overflow, ValidationError, ZeroNorm

NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateSpec:
    """Normalized single-copy amplitudes ``c_0 ... c_K``."""

    c: tuple[complex, ...]

    def __post_init__(self):
        if len(self.c) == 0:
            raise EmptySpec("state needs at least one amplitude")
        norm2 = sum(abs(x) ** 2 for x in self.c)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValidationError(f"amplitudes are not normalized (|c|^2 = {norm2!r})")

    @property
    def K(self) -> int:
        return len(self.c) - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(np.asarray(self.c, dtype=complex)) ** 2

    def as_array(self) -> np.ndarray:
        return np.asarray(self.c, dtype=complex)

    def is_real_nonnegative(self, tol: float = NORM_TOL) -> bool:
        return all(abs(x.imag) <= tol and x.real >= -tol for x in self.c)


@dataclass(frozen=True)
class SymmetricState:
    """N-copy state on the ladder ``|J>``, ``J = 0 ... K*N``."""

    K: int
    N: int
    A: tuple[float, ...]

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("copy count N must be >= 1")
        if len(self.A) != self.K * self.N + 1:
            raise ValidationError("ladder amplitudes must have length K*N + 1")
        if any(a < 0 for a in self.A):
            raise ValidationError("ladder amplitudes must be nonnegative")
        if abs(sum(a * a for a in self.A) - 1.0) > NORM_TOL:
            raise ValidationError("ladder amplitudes are not normalized")

    @property
    def dim(self) -> int:
        return self.K * self.N + 1

    @property
    def bosonic_dim(self) -> int:
        """Dimension ``binom(N + K, K)`` of the full symmetric subspace."""
        return comb(self.N + self.K, self.K)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.A, dtype=float)


@dataclass(frozen=True)
class OverlapCoefficients:
    """Autocorrelations ``d_L = sum_k |c_{k+L} c_k|^2`` for ``L = 0 ... K``."""

    d: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)


def make_state_spec(amplitudes: Sequence[complex]) -> StateSpec:
    """Normalize raw amplitudes into a :class:`StateSpec`.

    >>> make_state_spec([1, 1]).K
    1
    """
    amps = [complex(a) for a in amplitudes]
    if not amps:
        raise EmptySpec("state needs at least one amplitude")
    norm = float(np.sqrt(sum(abs(a) ** 2 for a in amps)))
    if norm == 0.0:
        raise ZeroNorm("all amplitudes are zero")
    return StateSpec(tuple(a / norm for a in amps))


def evolved_single(spec: StateSpec, theta: float) -> np.ndarray:
    """Apply ``exp(-i theta O)`` to the single-copy state."""
    k = np.arange(spec.K + 1)
    return spec.as_array() * np.exp(-1j * theta * k)


def occupation_tuples(N: int, K: int, J: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield ``(n_0, ..., n_K)`` with ``sum n_k = N`` (and ``sum k n_k = J`` if given).

    Branches that can no longer reach ``J`` are pruned, which keeps the
    per-``J`` enumeration polynomial in ``N``.
    """
    if N < 0 or K < 0:
        return
    # depth-first over modes; a node is (next mode k, quanta left, label so far, prefix)
    stack: list[tuple[int, int, int, tuple[int, ...]]] = [(0, N, 0, ())]
    while stack:
        k, left, weight, prefix = stack.pop()
        if left == 0:
            if J is None or weight == J:
                yield prefix + (0,) * (K + 1 - k)
            continue
        if k == K:
            if J is None or weight + K * left == J:
                yield prefix + (left,)
            continue
        for n in range(left + 1):
            w = weight + k * n
            rest = left - n
            # labels reachable from here lie in [w + (k+1)*rest, w + K*rest]
            if J is not None and (w + (k + 1) * rest > J or w + K * rest < J):
                continue
            stack.append((k + 1, rest, w, prefix + (n,)))


def _ladder_log_weights(N: int, log_p: list[float]) -> Iterator[tuple[int, float]]:
    # (J, log of N! prod_k p_k^{n_k} / n_k!) over all occupations; log-weight
    # is accumulated along the search so nothing is rescanned per tuple
    K = len(log_p) - 1
    stack = [(0, N, 0, lgamma(N + 1))]
    while stack:
        k, left, weight, lw = stack.pop()
        if left == 0:
            yield weight, lw
            continue
        if k == K:
            if log_p[K] > -np.inf:
                yield weight + K * left, lw + left * log_p[K] - lgamma(left + 1)
            continue
        stack.append((k + 1, left, weight, lw))
        if log_p[k] == -np.inf:
            continue  # occupying a zero-amplitude mode contributes nothing
        for n in range(1, left + 1):
            stack.append((k + 1, left - n, weight + k * n, lw + n * log_p[k] - lgamma(n + 1)))


def symmetric_amplitudes(spec: StateSpec, N: int) -> SymmetricState:
    """Compress ``|psi>^{(x)N}`` onto the ladder of total eigenvalues.

    ``A_J^2`` is the sum of ``N! prod_k |c_k|^{2 n_k} / n_k!`` over occupation
    tuples with total label ``J``.  Terms are formed in log space so large
    ``N`` does not overflow the factorials.
    """
    if N < 1:
        raise ValidationError("copy count N must be >= 1")
    K = spec.K
    log_p = [log(p) if p > 0 else -np.inf for p in spec.probabilities]
    A2 = np.zeros(K * N + 1)
    for J, lw in _ladder_log_weights(N, log_p):
        try:
            A2[J] += exp(lw)
        except OverflowError as err:  # pragma: no cover - weights are <= 1
            raise Overflow(f"term overflow at J = {J}") from err
    A2 /= A2.sum()  # strip accumulated rounding; the exact sum is 1
    return SymmetricState(K=K, N=N, A=tuple(float(a) for a in np.sqrt(A2)))


def overlap_coefficients(spec: StateSpec) -> OverlapCoefficients:
    p = spec.probabilities
    K = spec.K
    return OverlapCoefficients(tuple(float(np.dot(p[L:], p[: K + 1 - L])) for L in range(K + 1)))


def evolved_symmetric(sym: SymmetricState, theta: float) -> np.ndarray:
    J = np.arange(sym.dim)
    return sym.as_array() * np.exp(-1j * theta * J)
