"""Monte Carlo simulation of the estimation protocol.

Each trial draws ``theta`` uniformly, samples an outcome ``m`` from the POM,
guesses ``2 pi m / M`` and scores the single-copy fidelity.  Trials run in
fixed-size batches, each with its own child stream of one ``SeedSequence``,
so results do not depend on how batches are scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .pom import Pom, sample_states, srm
from .symstate import (
    StateSpec,
    SymmetricState,
    evolved_single,
    evolved_symmetric,
    overlap_coefficients,
    symmetric_amplitudes,
)

BATCH_SIZE = 1 << 16


@dataclass(frozen=True)
class TrialRecord:
    theta_true: float
    outcome: int
    theta_guess: float
    fidelity: float


@dataclass(frozen=True)
class SimulationSummary:
    trials: int
    mean_score: float
    std_error: float
    seed: int

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_score": self.mean_score,
            "std_error": self.std_error,
            "seed": self.seed,
        }


def outcome_probabilities(pom: Pom, sym: SymmetricState, thetas: np.ndarray) -> np.ndarray:
    """Outcome probabilities for many angles at once, shape ``(len(thetas), M)``."""
    if pom.dim != sym.dim:
        raise DimensionMismatch(f"POM dim {pom.dim} vs ladder dim {sym.dim}")
    thetas = np.asarray(thetas, dtype=float).reshape(-1)
    J = np.arange(sym.dim)
    states = sym.as_array()[None, :] * np.exp(-1j * thetas[:, None] * J[None, :])
    return pom.weights[None, :] * np.abs(states @ pom.vectors.conj().T) ** 2


def outcome_distribution(pom: Pom, sym: SymmetricState, theta: float) -> np.ndarray:
    if pom.dim != sym.dim:
        raise DimensionMismatch(f"POM dim {pom.dim} vs ladder dim {sym.dim}")
    amps = pom.vectors.conj() @ evolved_symmetric(sym, theta)
    return pom.weights * np.abs(amps) ** 2


def score_given_outcome(spec: StateSpec, theta_true: float, m: int, M: int) -> float:
    """Fidelity of the guess ``2 pi m / M`` through the cosine expansion."""
    d = overlap_coefficients(spec).as_array()
    delta = 2 * np.pi * m / M - theta_true
    L = np.arange(1, spec.K + 1)
    return float(d[0] + 2 * np.sum(d[1:] * np.cos(L * delta)))


def fidelity_direct(spec: StateSpec, theta_true: float, theta_guess: float) -> float:
    return float(abs(np.vdot(evolved_single(spec, theta_guess), evolved_single(spec, theta_true))) ** 2)


def _batches(trials: int, seed: int) -> Iterator[tuple[np.random.Generator, int]]:
    nbatch = -(-trials // BATCH_SIZE)
    children = np.random.SeedSequence(seed).spawn(nbatch)
    for i, child in enumerate(children):
        size = min(BATCH_SIZE, trials - i * BATCH_SIZE)
        yield np.random.default_rng(child), size


def _run_batch(rng: np.random.Generator, size: int, pom: Pom, sym: SymmetricState, d: np.ndarray):
    theta = rng.uniform(0.0, 2 * np.pi, size)
    u = rng.random(size)
    cdf = np.cumsum(outcome_probabilities(pom, sym, theta), axis=1)
    m = np.minimum((u[:, None] >= cdf).sum(axis=1), pom.M - 1)
    guess = 2 * np.pi * m / pom.M
    L = np.arange(1, d.shape[0])
    fid = d[0] + 2 * (d[None, 1:] * np.cos(L[None, :] * (guess - theta)[:, None])).sum(axis=1)
    return theta, m, guess, fid


def _setup(spec: StateSpec, N: int, M: int, trials: int, pom: Pom | None):
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    sym = symmetric_amplitudes(spec, N)
    if pom is None:
        if M < sym.dim:
            raise ValidationError(f"simulation needs M >= KN + 1 = {sym.dim}")
        pom = srm(sample_states(sym, M))
    elif pom.M != M:
        raise DimensionMismatch("POM outcome count differs from M")
    return sym, pom, overlap_coefficients(spec).as_array()


def simulate(
    spec: StateSpec, N: int, M: int, trials: int, seed: int, pom: Pom | None = None
) -> SimulationSummary:
    """Run ``trials`` independent rounds and summarize the fidelity."""
    sym, pom, d = _setup(spec, N, M, trials, pom)
    count, mean, m2 = 0, 0.0, 0.0
    # Chan et al. pairwise merge, applied in batch order
    for rng, size in _batches(trials, seed):
        fid = _run_batch(rng, size, pom, sym, d)[3]
        b_mean = float(fid.mean())
        b_m2 = float(((fid - b_mean) ** 2).sum())
        total = count + size
        delta = b_mean - mean
        mean += delta * size / total
        m2 += b_m2 + delta * delta * count * size / total
        count = total
    std = np.sqrt(m2 / (count - 1)) if count > 1 else 0.0
    return SimulationSummary(trials=count, mean_score=mean, std_error=float(std / np.sqrt(count)), seed=seed)


def trial_records(
    spec: StateSpec, N: int, M: int, trials: int, seed: int, pom: Pom | None = None
) -> list[TrialRecord]:
    """Per-trial records drawn from the same streams as :func:`simulate`."""
    sym, pom, d = _setup(spec, N, M, trials, pom)
    out = []
    for rng, size in _batches(trials, seed):
        theta, m, guess, fid = _run_batch(rng, size, pom, sym, d)
        out.extend(
            TrialRecord(float(t), int(k), float(g), float(f)) for t, k, g, f in zip(theta, m, guess, fid)
        )
    return out
