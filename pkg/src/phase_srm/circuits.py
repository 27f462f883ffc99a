"""Dense statevector simulation of the qubit measurement pipelines.

Qubit 0 is the leftmost ket symbol and the most significant bit of a basis
index, so ``|01>`` is index 1 and ``|10>`` is index 2.

For ``N = 2, 3, 4`` copies of a qubit the optimal measurement is realized as
a basis transform ``T(N)`` that compresses the symmetric (Dicke) vectors onto
low computational basis states, followed by a quantum Fourier transform on
the measured register and a computational-basis readout.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import comb, pi, sqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonRealSpec, UnsupportedN, ValidationError
from .pom import Pom, sample_angles
from .symstate import StateSpec, evolved_single

_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)

V1 = np.array([[1 / sqrt(3), sqrt(2 / 3)], [-sqrt(2 / 3), 1 / sqrt(3)]], dtype=complex)
V2 = np.array([[1 / 2, sqrt(3) / 2], [-sqrt(3) / 2, 1 / 2]], dtype=complex)

UNITARY_TOL = 1e-12
SUPPORTED_N = (2, 3, 4)


class GateKind(str, enum.Enum):
    HADAMARD = "Hadamard"
    NOT = "NOT"
    CNOT = "ControlledNOT"
    TOFFOLI = "Toffoli"
    CPHASE = "ControlledPhase"
    CU = "ControlledUnitary"
    SWAP = "Swap"
    CUSTOM = "Custom"


@dataclass(frozen=True, eq=False)
class Gate:
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    control_values: tuple[int, ...] = ()
    phi: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        if not self.control_values:
            object.__setattr__(self, "control_values", (1,) * len(self.controls))
        if len(self.control_values) != len(self.controls):
            raise ValidationError("one control value per control qubit")
        if set(self.targets) & set(self.controls):
            raise ValidationError("control and target qubits overlap")
        if len(set(self.targets)) != len(self.targets) or len(set(self.controls)) != len(self.controls):
            raise ValidationError("repeated qubit index in gate")

    def local_matrix(self) -> np.ndarray:
        """Matrix on the target qubits (big-endian among targets)."""
        k = self.kind
        if k is GateKind.HADAMARD:
            return _H
        if k in (GateKind.NOT, GateKind.CNOT, GateKind.TOFFOLI):
            return _X
        if k is GateKind.CPHASE:
            return np.diag([1.0, np.exp(1j * self.phi)]).astype(complex)
        if k is GateKind.SWAP:
            return _SWAP
        return np.asarray(self.matrix, dtype=complex)

    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def shifted(self, offset: int) -> "Gate":
        return Gate(
            self.kind,
            tuple(q + offset for q in self.targets),
            tuple(q + offset for q in self.controls),
            self.control_values,
            self.phi,
            self.matrix,
            self.label,
        )

    def describe(self) -> str:
        parts = [self.kind.value]
        if self.controls:
            ctl = ",".join(f"{q}" if v else f"!{q}" for q, v in zip(self.controls, self.control_values))
            parts.append(f"controls=[{ctl}]")
        parts.append("targets=[" + ",".join(str(q) for q in self.targets) + "]")
        if self.phi is not None:
            parts.append(f"phi={self.phi:.17g}")
        if self.matrix is not None:
            rows = ";".join(
                ",".join(_fmt_complex(x) for x in row) for row in np.asarray(self.matrix)
            )
            parts.append(f"matrix=[{rows}]")
        if self.label:
            parts.append(f"# {self.label}")
        return " ".join(parts)


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.17g}"
    return f"{z.real:.17g}{z.imag:+.17g}j"


def hadamard(q: int, label: str = "") -> Gate:
    return Gate(GateKind.HADAMARD, (q,), label=label)


def x_gate(q: int, label: str = "") -> Gate:
    return Gate(GateKind.NOT, (q,), label=label)


def cnot(control: int, target: int, label: str = "") -> Gate:
    return Gate(GateKind.CNOT, (target,), (control,), label=label)


def toffoli(c1: int, c2: int, target: int, values: tuple[int, int] = (1, 1), label: str = "") -> Gate:
    return Gate(GateKind.TOFFOLI, (target,), (c1, c2), values, label=label)


def cphase(phi: float, a: int, b: int, label: str = "") -> Gate:
    """Two-qubit gate ``|x>|y> -> e^{i x y phi} |x>|y>``."""
    return Gate(GateKind.CPHASE, (b,), (a,), phi=phi, label=label)


def controlled_unitary(
    u: np.ndarray, target: int, controls: Sequence[int] = (), values: Sequence[int] = (), label: str = ""
) -> Gate:
    return Gate(GateKind.CU, (target,), tuple(controls), tuple(values), matrix=np.asarray(u, dtype=complex), label=label)


def swap(a: int, b: int, label: str = "") -> Gate:
    return Gate(GateKind.SWAP, (a, b), label=label)


def custom(matrix: np.ndarray, targets: Sequence[int], label: str = "") -> Gate:
    return Gate(GateKind.CUSTOM, tuple(targets), matrix=np.asarray(matrix, dtype=complex), label=label)


def _bit(index: int, q: int, n: int) -> int:
    return (index >> (n - 1 - q)) & 1


def gate_unitary(gate: Gate, n: int) -> np.ndarray:
    """Full ``2^n x 2^n`` matrix of ``gate`` acting on ``n`` qubits."""
    if any(q < 0 or q >= n for q in gate.qubits()):
        raise DimensionMismatch(f"gate {gate.describe()} addresses a qubit outside 0..{n - 1}")
    local = gate.local_matrix()
    t = gate.targets
    if local.shape != (2 ** len(t), 2 ** len(t)):
        raise ValidationError(f"gate matrix shape {local.shape} does not fit {len(t)} target qubit(s)")
    dim = 2**n
    U = np.zeros((dim, dim), dtype=complex)
    tmask = sum(1 << (n - 1 - q) for q in t)
    for col in range(dim):
        if any(_bit(col, q, n) != v for q, v in zip(gate.controls, gate.control_values)):
            U[col, col] = 1.0
            continue
        sub = 0
        for q in t:
            sub = (sub << 1) | _bit(col, q, n)
        base = col & ~tmask
        for out in range(2 ** len(t)):
            amp = local[out, sub]
            if amp == 0:
                continue
            row = base
            for pos, q in enumerate(t):
                if (out >> (len(t) - 1 - pos)) & 1:
                    row |= 1 << (n - 1 - q)
            U[row, col] += amp
    return U


@dataclass(frozen=True, eq=False)
class Circuit:
    qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.qubits for q in g.qubits()):
                raise DimensionMismatch(f"gate {g.describe()} outside a {self.qubits}-qubit register")

    def then(self, other: "Circuit", offset: int = 0) -> "Circuit":
        """Append ``other`` with its qubit ``k`` placed on qubit ``k + offset``."""
        if offset + other.qubits > self.qubits:
            raise DimensionMismatch("appended circuit does not fit")
        return Circuit(self.qubits, self.gates + tuple(g.shifted(offset) for g in other.gates))

    def unitary(self) -> np.ndarray:
        U = np.eye(2**self.qubits, dtype=complex)
        for g in self.gates:
            U = gate_unitary(g, self.qubits) @ U
        return U

    def listing(self) -> str:
        lines = [f"qubits {self.qubits}"]
        lines += [g.describe() for g in self.gates]
        return "\n".join(lines)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = amps.shape[0].bit_length() - 1
        if amps.shape[0] != 2**n:
            raise DimensionMismatch("statevector length must be a power of two")
        if abs(np.linalg.norm(amps) - 1.0) > UNITARY_TOL * 10:
            raise ValidationError("statevector is not normalized")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def qubits(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)


def apply(circuit: Circuit, psi: StateVector) -> StateVector:
    if psi.qubits != circuit.qubits:
        raise DimensionMismatch(f"{circuit.qubits}-qubit circuit on a {psi.qubits}-qubit state")
    amps = psi.amplitudes
    for g in circuit.gates:
        amps = gate_unitary(g, circuit.qubits) @ amps
    return StateVector(amps)


def unitarity_deviation(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


# --- Fourier transform -------------------------------------------------------


def dft_unitary(n: int, bit_reversal: bool = True) -> Circuit:
    """Quantum Fourier transform network on ``n`` qubits.

    With ``bit_reversal`` the induced unitary is the Fourier matrix
    ``U[m, L] = e^{2 pi i m L / 2^n} / sqrt(2^n)``, i.e. ``U^dagger |m>``
    has components ``e^{-2 pi i m L / 2^n} / sqrt(2^n)``.  Without the final
    swaps the output register is bit reversed, which is the layout of the
    two-qubit network whose outcomes ``|00>, |10>, |01>, |11>`` label the
    guesses ``0, pi/2, pi, 3pi/2``.
    """
    if n < 1:
        raise ValidationError("need at least one qubit")
    gates: list[Gate] = []
    for j in range(n):
        gates.append(hadamard(j))
        for k in range(j + 1, n):
            gates.append(cphase(2 * pi / 2 ** (k - j + 1), k, j))
    if bit_reversal:
        gates += [swap(j, n - 1 - j, label="bit reversal") for j in range(n // 2)]
    return Circuit(n, gates)


def fourier_matrix(size: int) -> np.ndarray:
    m = np.arange(size)
    return np.exp(2j * pi * np.outer(m, m) / size) / sqrt(size)


def bit_reverse(value: int, width: int) -> int:
    return int(format(value, f"0{width}b")[::-1], 2)


# --- two-level rotations and compression synthesis ---------------------------


def _flip(index: int, q: int, n: int) -> int:
    return index ^ (1 << (n - 1 - q))


def _pair_gate(n: int, a: int, q: int, u: np.ndarray, label: str) -> Gate:
    # rotate the pair (a, a with qubit q flipped) by u, in the order (a, partner)
    others = [p for p in range(n) if p != q]
    values = [_bit(a, p, n) for p in others]
    if _bit(a, q, n) == 1:
        u = _X @ u @ _X
    if np.allclose(u, _X):
        kind = {0: GateKind.NOT, 1: GateKind.CNOT, 2: GateKind.TOFFOLI}.get(len(others))
        if kind is not None:
            return Gate(kind, (q,), tuple(others), tuple(values), label=label)
    return controlled_unitary(u, q, others, values, label=label)


def two_level_gates(n: int, i: int, j: int, u: np.ndarray, label: str = "") -> list[Gate]:
    """Gates applying ``u`` to the amplitudes of basis states ``i`` and ``j`` only.

    States differing in several bits are brought together along a Gray-code
    path of fully controlled NOTs, rotated, and the path is undone.
    """
    if i == j:
        raise ValidationError("two-level rotation needs distinct states")
    diff = [q for q in range(n) if _bit(i, q, n) != _bit(j, q, n)]
    path = [i]
    for q in diff[:-1]:
        path.append(_flip(path[-1], q, n))
    moves = [_pair_gate(n, path[k], diff[k], _X, label) for k in range(len(path) - 1)]
    core = _pair_gate(n, path[-1], diff[-1], u, label)
    return moves + [core] + moves[::-1]


def _givens(a: complex, b: complex) -> np.ndarray:
    r = sqrt(abs(a) ** 2 + abs(b) ** 2)
    return np.array([[np.conj(a), np.conj(b)], [-b, a]], dtype=complex) / r


def synthesize_compression(
    n: int, sources: Sequence[np.ndarray], targets: Sequence[int], label: str = "", tol: float = 1e-13
) -> Circuit:
    """Two-level rotation network sending ``sources[k]`` to ``|targets[k]>``.

    Sources must be orthonormal.  Each source is collapsed onto its target
    with rotations that never touch earlier targets, so earlier mappings are
    preserved; the final coefficient is real positive.
    """
    if len(sources) != len(targets) or len(set(targets)) != len(targets):
        raise ValidationError("need one distinct target per source")
    gates: list[Gate] = []
    U = np.eye(2**n, dtype=complex)
    for k, (src, tgt) in enumerate(zip(sources, targets)):
        frozen = set(targets[:k])
        v = U @ np.asarray(src, dtype=complex)
        for idx in range(2**n):
            if idx == tgt or idx in frozen or abs(v[idx]) <= tol:
                continue
            step = two_level_gates(n, tgt, idx, _givens(v[tgt], v[idx]), label)
            for g in step:
                G = gate_unitary(g, n)
                U = G @ U
                v = G @ v
            gates += step
        if abs(v[tgt].imag) > tol or v[tgt].real < 0:
            ph = np.conj(v[tgt]) / abs(v[tgt])
            # phase on |tgt> alone: rotate pair with a diagonal u
            partner = next(idx for idx in range(2**n) if idx != tgt and idx not in frozen)
            step = two_level_gates(n, tgt, partner, np.diag([ph, np.conj(ph)]), label)
            for g in step:
                G = gate_unitary(g, n)
                U = G @ U
                v = G @ v
            gates += step
    return Circuit(n, gates)


def dicke_vector(N: int, J: int) -> np.ndarray:
    """Symmetric ``N``-qubit state with ``J`` excitations, unit norm."""
    v = np.zeros(2**N, dtype=complex)
    for idx in range(2**N):
        if bin(idx).count("1") == J:
            v[idx] = 1.0
    return v / sqrt(comb(N, J))


def compression_targets(N: int) -> list[int]:
    """Computational basis indices receiving the ladder vectors ``|J>``."""
    if N not in SUPPORTED_N:
        raise UnsupportedN(f"basis transform defined for N in {SUPPORTED_N}, got {N}")
    # N=2: |00>,|01>,|10>;  N=3: |0>(x){|00>..|11>};  N=4: |0>(x){|000>..|100>}
    return list(range(N + 1))


def _t2() -> Circuit:
    return Circuit(2, [cnot(0, 1, "T2"), controlled_unitary(_H, 0, [1], label="T2")])


def _t3() -> Circuit:
    c = Circuit(3).then(_t2(), 0)
    # |100> -> |110>, leaving the image |101> of |3> alone
    c = Circuit(3, c.gates + (toffoli(0, 2, 1, values=(1, 0), label="T3 block 2"),))
    # remaining images after blocks 1-2, collapsed by the S3(v1) stage
    U = c.unitary()
    sources = [U @ dicke_vector(3, J) for J in range(4)]
    return c.then(synthesize_compression(3, sources, [0, 1, 2, 3], "T3 S3(v1)"))


def _t4() -> Circuit:
    c = Circuit(4).then(_t3(), 0)
    U = c.unitary()
    # first qubit is |0> on every image; keep the lower 3-qubit factor
    sources = []
    for J in range(5):
        img = U @ dicke_vector(4, J)
        if np.max(np.abs(img[8:])) > 1e-12:
            raise AssertionError("T3 stage left the first qubit excited")
        sources.append(img[:8])
    tail = synthesize_compression(3, sources, [0, 1, 2, 3, 4], "T4 tail")
    return c.then(tail, 1)


def basis_transform(N: int) -> Circuit:
    """Gate network mapping the Dicke vectors ``|J>`` to ``|J>`` in binary.

    ``N = 2`` maps onto ``|00>, |01>, |10>``; ``N = 3`` onto
    ``|0>(x){|00>, |01>, |10>, |11>}``; ``N = 4`` onto
    ``|0>(x){|000>, ..., |100>}``.  The action on the complement of the
    symmetric subspace is whatever completion the gates induce.
    """
    if N == 2:
        return _t2()
    if N == 3:
        return _t3()
    if N == 4:
        return _t4()
    raise UnsupportedN(f"basis transform defined for N in {SUPPORTED_N}, got {N}")


def completion_unitary(N: int) -> np.ndarray:
    """Dense alternative to :func:`basis_transform` by Gram-Schmidt completion.

    Pinned pairs map Dicke vectors to their targets with a positive matrix
    element.  Unassigned inputs are completed in lexicographic order, each
    onto the first unused computational basis state.
    """
    targets = compression_targets(N)
    dim = 2**N
    inputs = [dicke_vector(N, J) for J in range(N + 1)]
    basis = list(inputs)
    for idx in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[idx] = 1.0
        for b in basis:
            e -= np.vdot(b, e) * b
        if np.linalg.norm(e) > 1e-9:
            basis.append(e / np.linalg.norm(e))
    unused = [t for t in range(dim) if t not in targets]
    outs = targets + unused
    U = np.zeros((dim, dim), dtype=complex)
    for vec, out in zip(basis, outs):
        U[out, :] += vec.conj()
    return U


# --- measurement pipelines ---------------------------------------------------


@dataclass(frozen=True)
class PipelineLayout:
    N: int
    measured: tuple[int, ...]
    reversed_readout: bool

    @property
    def outcomes(self) -> int:
        return 2 ** len(self.measured)


def pipeline_layout(N: int) -> PipelineLayout:
    if N == 2:
        return PipelineLayout(2, (0, 1), True)
    if N == 3:
        return PipelineLayout(3, (1, 2), True)
    if N == 4:
        return PipelineLayout(4, (1, 2, 3), False)
    raise UnsupportedN(f"pipelines exist for N in {SUPPORTED_N}, got {N}")


def pipeline_circuit(N: int) -> Circuit:
    """``T(N)`` followed by the Fourier network on the measured register.

    ``N = 2, 3`` use the two-qubit network without swaps and read outcomes
    in bit-reversed order; ``N = 4`` uses the full three-qubit transform.
    """
    lay = pipeline_layout(N)
    dft = dft_unitary(len(lay.measured), bit_reversal=not lay.reversed_readout)
    return Circuit(N).then(basis_transform(N)).then(dft, lay.measured[0])


def _check_qubit_spec(spec: StateSpec) -> None:
    if spec.K != 1:
        raise ValidationError(f"qubit pipelines need K = 1, got K = {spec.K}")
    if not spec.is_real_nonnegative():
        raise NonRealSpec("qubit pipelines assume real nonnegative amplitudes")


def product_state(spec: StateSpec, N: int, theta: float) -> StateVector:
    single = evolved_single(spec, theta)
    amps = np.ones(1, dtype=complex)
    for _ in range(N):
        amps = np.kron(amps, single)
    return StateVector(amps)


def readout_to_outcome(bits: int, layout: PipelineLayout) -> int:
    width = len(layout.measured)
    return bit_reverse(bits, width) if layout.reversed_readout else bits


def pipeline_distribution(
    spec: StateSpec, N: int, theta: float, circuit: Circuit | np.ndarray | None = None
) -> np.ndarray:
    """Outcome probabilities ``p[m]`` of the circuit readout; guess ``2 pi m / M``.

    ``circuit`` may override the default network, either as a circuit or a
    dense unitary; it must realize the same pipeline.
    """
    _check_qubit_spec(spec)
    lay = pipeline_layout(N)
    if circuit is None:
        circuit = pipeline_circuit(N)
    U = circuit.unitary() if isinstance(circuit, Circuit) else np.asarray(circuit)
    out = U @ product_state(spec, N, theta).amplitudes
    probs = np.abs(out) ** 2
    width = len(lay.measured)
    p = np.zeros(lay.outcomes)
    for idx, pr in enumerate(probs):
        bits = 0
        for q in lay.measured:
            bits = (bits << 1) | _bit(idx, q, N)
        p[readout_to_outcome(bits, lay)] += pr
    return p


def pipeline_unitary_with_completion(N: int) -> np.ndarray:
    """Pipeline unitary using :func:`completion_unitary` in place of the gates."""
    lay = pipeline_layout(N)
    dft = dft_unitary(len(lay.measured), bit_reversal=not lay.reversed_readout)
    return Circuit(N).then(dft, lay.measured[0]).unitary() @ completion_unitary(N)


def pipeline_average_score(spec: StateSpec, N: int, gridpoints: int | None = None) -> float:
    """Average fidelity of the circuit strategy by periodic-trapezoid quadrature."""
    _check_qubit_spec(spec)
    lay = pipeline_layout(N)
    if gridpoints is None:
        gridpoints = 4 * (N + 1) + 8
    U = pipeline_circuit(N).unitary()
    M = lay.outcomes
    guesses = np.stack([evolved_single(spec, g) for g in sample_angles(M)])
    total = 0.0
    for theta in sample_angles(gridpoints):
        p = pipeline_distribution(spec, N, theta, U)
        fid = np.abs(guesses.conj() @ evolved_single(spec, theta)) ** 2
        total += float(np.dot(p, fid))
    return total / gridpoints


def naimark_vectors(n: int) -> np.ndarray:
    """Rows ``|Pi_m>`` with components ``e^{-2 pi i m L / 2^n} / sqrt(2^n)``."""
    return fourier_matrix(2**n).conj()


def circuits_for(N: int) -> dict[str, Circuit]:
    lay = pipeline_layout(N)
    return {
        "basis_transform": basis_transform(N),
        "dft": dft_unitary(len(lay.measured), bit_reversal=not lay.reversed_readout),
        "pipeline": pipeline_circuit(N),
    }


def abstract_pom(N: int) -> Pom:
    """Fourier SRM on the ladder space that the pipeline for ``N`` realizes."""
    M = pipeline_layout(N).outcomes
    m = np.arange(M)[:, None]
    J = np.arange(N + 1)[None, :]
    return Pom(np.exp(-2j * pi * m * J / M) / sqrt(M), np.ones(M))


def iter_supported() -> Iterable[int]:
    return iter(SUPPORTED_N)
