"""
Desk-scale dense-statevector emulation of the measurement protocol.

Builds |Omega> as an explicit amplitude vector, rotates each qubit by the
real orthogonal O_a that diagonalizes its local observable (A_a = O_a^T Z
O_a), and estimates the partition function by sampling the parity of
all-qubit Z measurement outcomes.  Doubles as the independent oracle for
the stabilizer sampler: exact output distributions and expectations are
available for any state under the qubit cap.

Basis convention: qubit a is bit a (least significant first) of the integer
index into the amplitude vector, matching BitVector.to_int().
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .gf2 import DEFAULT_ENUM_CAP, BitMatrix, CapExceededError, codeword_table, column_space_basis
from .ising import LN2, IsingModel, LocalPhase, gamma, local_phases

#: Largest dense register accepted by default (2**26 complex doubles = 1 GiB).
DEFAULT_QUBIT_CAP = 26


@dataclass(frozen=True)
class DenseState:
    """A normalized V-qubit state as 2**V complex amplitudes."""

    num_qubits: int
    amplitudes: np.ndarray

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def _check_cap(num_qubits: int, cap: int) -> None:
    if num_qubits > cap:
        raise CapExceededError(f"{num_qubits} qubits exceed the dense cap {cap}")


def build_omega_dense(
    B: BitMatrix, cap: int = DEFAULT_QUBIT_CAP, enum_cap: int = DEFAULT_ENUM_CAP
) -> DenseState:
    """|Omega>: equal amplitude 1/sqrt(2**k) on every column-space codeword of B."""
    V = B.rows
    _check_cap(V, cap)
    basis = column_space_basis(B)
    if basis.cols > enum_cap:
        raise CapExceededError(f"codeword enumeration over {basis.cols} generators exceeds cap {enum_cap}")
    words = codeword_table(basis, cap=enum_cap)
    indices = words[:, 0].astype(np.int64)  # V <= cap < 64 fits one word
    amps = np.zeros(1 << V, dtype=np.complex128)
    amps[indices] = 1.0 / math.sqrt(words.shape[0])
    return DenseState(V, amps)


def build_product_state(vectors: np.ndarray) -> DenseState:
    """Tensor product of V single-qubit states given as a (V, 2) array."""
    vectors = np.asarray(vectors, dtype=np.complex128)
    psi = np.ones(1, dtype=np.complex128)
    for a in range(vectors.shape[0]):
        psi = np.kron(vectors[a], psi)  # qubit a becomes bit a of the index
    return DenseState(vectors.shape[0], psi)


def apply_one_qubit(state: DenseState, qubit: int, matrix: np.ndarray) -> DenseState:
    """Apply a 2x2 matrix to one qubit; returns a new state."""
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range")
    arr = state.amplitudes.reshape(-1, 2, 1 << qubit)
    out = np.einsum("ab,xby->xay", np.asarray(matrix, dtype=np.complex128), arr)
    return DenseState(n, np.ascontiguousarray(out.reshape(-1)))


def dense_distribution(state: DenseState, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """The outcome probabilities p_x = |<x|psi>|^2 as a length-2**V vector."""
    _check_cap(state.num_qubits, cap)
    return np.abs(state.amplitudes) ** 2


def state_overlap(a: DenseState, b: DenseState) -> complex:
    """<a|b>."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("qubit count mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def parity_expectation(state: DenseState) -> float:
    """<psi| Z^(x)V |psi> = sum_x p_x (-1)^popcount(x)."""
    n = state.num_qubits
    idx = np.arange(1 << n, dtype=np.uint64)
    sign = 1.0 - 2.0 * (np.bitwise_count(idx) & np.uint64(1)).astype(np.float64)
    return float(np.sum(dense_distribution(state, cap=n) * sign))


def diagonalize_A(phase: LocalPhase) -> np.ndarray:
    """A real orthogonal O with O^T Z O = [[x, y], [y, -x]].

    Convention: the rotation by theta/2,
    O = [[cos(theta/2), sin(theta/2)], [-sin(theta/2), cos(theta/2)]];
    theta -> 0 (the A = Z limit) gives the identity.
    """
    h = phase.theta / 2.0
    c, s = math.cos(h), math.sin(h)
    return np.array([[c, s], [-s, c]])


def rotated_model_state(
    model: IsingModel, cap: int = DEFAULT_QUBIT_CAP, enum_cap: int = DEFAULT_ENUM_CAP
) -> DenseState:
    """|xi> = (tensor_a O_a) |Omega> for the model's local observables."""
    from .colex import incidence_matrix

    state = build_omega_dense(incidence_matrix(model.colex), cap=cap, enum_cap=enum_cap)
    phases = local_phases(model)
    for a in range(state.num_qubits):
        state = apply_one_qubit(state, a, diagonalize_A(phases[a]))
    return state


def emulate_quantum_protocol(
    model: IsingModel,
    plan,
    seed: int,
    cap: int = DEFAULT_QUBIT_CAP,
    enum_cap: int = DEFAULT_ENUM_CAP,
    shard_size: int = 4096,
):
    """Run the measurement protocol on the dense emulator.

    Prepares |xi>, samples K outcomes from |<x|xi>|^2 by inverse-CDF lookup,
    and averages the parity sign f(x) = (-1)^popcount(x), whose expectation
    is <Omega|A|Omega>.  Returns an EstimateResult with the same guarantee
    scale as the stabilizer estimator.
    """
    from .estimator import EstimateResult, shard_seed_sequences

    start_time = time.perf_counter()
    _check_cap(model.colex.vertex_count, cap)
    state = rotated_model_state(model, cap=cap, enum_cap=enum_cap)
    probs = dense_distribution(state, cap=cap)
    probs = probs / probs.sum()
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0

    K = plan.samples
    total = 0.0
    for rng, count in shard_seed_sequences(seed, 2, K, shard_size):
        u = rng.random(count)
        idx = np.searchsorted(cdf, u, side="right").astype(np.uint64)
        signs = 1.0 - 2.0 * (np.bitwise_count(idx) & np.uint64(1)).astype(np.float64)
        total += float(signs.sum())
    c = total / K

    F = model.colex.face_count
    log_gamma = gamma(model).log
    log_prefactor = log_gamma - (F - 2) / 2 * LN2
    return EstimateResult(
        method="qsim",
        expectation_estimate=complex(c),
        z_estimate=_safe_exp(log_prefactor) * c,
        log_abs_z_estimate=log_prefactor + (math.log(abs(c)) if c != 0 else -math.inf),
        z_sign=int(np.sign(c)) if c != 0 else 0,
        log_error_bound=log_prefactor + math.log(plan.epsilon),
        samples_used=K,
        seed=seed,
        imag_diagnostic=0.0,
        wall_time_s=time.perf_counter() - start_time,
    )


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf
