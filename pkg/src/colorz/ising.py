"""
3-body Ising models on 2-colexes and their exact oracles.

One spin sits on every face; every vertex couples the three spins on its
adjacent faces through -J_a * s1 * s2 * s3.  The partition function relates
to the color-code state |Omega> through two exact identities checked
against each other throughout the test suite:

    Z = gamma * <Omega|alpha>                      (product-state overlap)
    Z = gamma / sqrt(2**(F-2)) * <Omega|A|Omega>   (expectation form)

where alpha encodes temperature and couplings in per-vertex amplitudes
(x_a, y_a) and A is the tensor product of the per-vertex reflections
[[x_a, y_a], [y_a, -x_a]].  All heavy accumulation runs in the log domain;
exponentials of energies span hundreds of orders of magnitude already for
moderate beta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np

from .colex import Colex, incidence_matrix, vertex_face_triples
from .gf2 import (
    DEFAULT_ENUM_CAP,
    CapExceededError,
    codeword_table,
    column_space_basis,
    enumerate_codewords,
)

LN2 = math.log(2.0)

#: Spin-configuration chunk processed per vectorized pass of the oracles.
_CHUNK = 1 << 20


class LogValue(NamedTuple):
    """A positive quantity carried as its natural log plus the linear value.

    `linear` is `exp(log)` and overflows to inf gracefully; `log` is always
    finite for the quantities produced here.
    """

    log: float
    linear: float

    @classmethod
    def from_log(cls, log: float) -> "LogValue":
        try:
            linear = math.exp(log)
        except OverflowError:
            linear = math.inf
        return cls(log, linear)


@dataclass(frozen=True)
class IsingModel:
    """A colex, an inverse temperature beta >= 0, and one coupling per vertex."""

    colex: Colex
    beta: float
    couplings: tuple[float, ...]

    def __post_init__(self):
        if not (self.beta >= 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if len(self.couplings) != self.colex.vertex_count:
            raise ValueError(
                f"{len(self.couplings)} couplings for {self.colex.vertex_count} vertices"
            )
        if not all(math.isfinite(j) for j in self.couplings):
            raise ValueError("couplings must be finite")

    @classmethod
    def uniform(cls, colex: Colex, beta: float, coupling: float = 1.0) -> "IsingModel":
        return cls(colex, beta, (float(coupling),) * colex.vertex_count)

    @property
    def coupling_array(self) -> np.ndarray:
        return np.asarray(self.couplings, dtype=np.float64)


def load_couplings(path: Union[str, Path], vertex_count: int) -> tuple[float, tuple[float, ...]]:
    """Read a couplings JSON file: {"beta": b, "couplings": [...]} or {"beta": b, "uniform": J}."""
    data = json.loads(Path(path).read_text())
    try:
        beta = float(data["beta"])
        if "uniform" in data:
            couplings = (float(data["uniform"]),) * vertex_count
        else:
            couplings = tuple(float(j) for j in data["couplings"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed couplings document {path}: {exc}") from exc
    return beta, couplings


@dataclass(frozen=True)
class LocalPhase:
    """One vertex's amplitudes x = cos(theta), y = sin(theta) with theta in (0, pi/2)."""

    amplitude_x: float
    amplitude_y: float
    theta: float


class LocalPhases:
    """Per-vertex amplitude/angle table; indexable into LocalPhase records."""

    def __init__(self, amplitude_x: np.ndarray, amplitude_y: np.ndarray, theta: np.ndarray):
        self.amplitude_x = amplitude_x
        self.amplitude_y = amplitude_y
        self.theta = theta

    def __len__(self) -> int:
        return self.amplitude_x.shape[0]

    def __getitem__(self, a: int) -> LocalPhase:
        return LocalPhase(
            float(self.amplitude_x[a]), float(self.amplitude_y[a]), float(self.theta[a])
        )


def local_phases(model: IsingModel) -> LocalPhases:
    """Per-vertex amplitudes of |alpha_a> and the rotation angle theta_a.

    x_a = exp(beta J_a) / sqrt(exp(2 beta J_a) + exp(-2 beta J_a)) and y_a
    likewise with the opposite sign, evaluated on the overflow-free branch:
    x_a = 1/sqrt(1 + exp(-4 t)) for t = beta J_a >= 0 and the mirrored form
    for t < 0.  theta_a = atan2(y_a, x_a); beta = 0 gives exactly pi/4.
    """
    t = model.beta * model.coupling_array
    u = np.exp(-4.0 * np.abs(t))
    small = np.exp(-2.0 * np.abs(t))
    denom = np.sqrt(1.0 + u)
    x = np.where(t >= 0, 1.0, small) / denom
    y = np.where(t >= 0, small, 1.0) / denom
    return LocalPhases(x, y, np.arctan2(y, x))


def _log_amplitudes(model: IsingModel) -> tuple[np.ndarray, np.ndarray]:
    """(log x_a, log y_a) computed directly in the log domain."""
    t = model.beta * model.coupling_array
    at = np.abs(t)
    half_log1p = 0.5 * np.log1p(np.exp(-4.0 * at))
    log_large = -half_log1p
    log_small = -2.0 * at - half_log1p
    log_x = np.where(t >= 0, log_large, log_small)
    log_y = np.where(t >= 0, log_small, log_large)
    return log_x, log_y


def build_A(phase: LocalPhase) -> np.ndarray:
    """The per-vertex observable [[x, y], [y, -x]]: real orthogonal, det -1."""
    return np.array(
        [
            [phase.amplitude_x, phase.amplitude_y],
            [phase.amplitude_y, -phase.amplitude_x],
        ]
    )


def gamma(model: IsingModel) -> LogValue:
    """The overlap prefactor sqrt(2**(F+2)) * prod_a sqrt(exp(2 b J_a) + exp(-2 b J_a)).

    Computed as log gamma = (F+2)/2 * ln 2 + sum_a [|b J_a| + log1p(exp(-4 |b J_a|)) / 2],
    which never overflows.
    """
    F = model.colex.face_count
    t = np.abs(model.beta * model.coupling_array)
    log = (F + 2) / 2 * LN2 + float(np.sum(t + 0.5 * np.log1p(np.exp(-4.0 * t))))
    return LogValue.from_log(log)


def energy(model: IsingModel, spins: np.ndarray) -> float:
    """H(s) = -sum_a J_a * s_f(a) * s_g(a) * s_h(a) over the vertex face triples."""
    spins = np.asarray(spins)
    F = model.colex.face_count
    if spins.shape != (F,):
        raise ValueError(f"expected {F} spins, got shape {spins.shape}")
    if not np.isin(spins, (-1, 1)).all():
        raise ValueError("spins must be +-1")
    triples = vertex_face_triples(model.colex)
    prod = spins[triples[:, 0]] * spins[triples[:, 1]] * spins[triples[:, 2]]
    return float(-np.sum(model.coupling_array * prod))


def _face_masks(model: IsingModel) -> np.ndarray:
    """Per-vertex bitmask over face indices of the three adjacent faces."""
    triples = vertex_face_triples(model.colex)
    masks = np.zeros(model.colex.vertex_count, dtype=np.uint64)
    for col in range(3):
        masks |= np.uint64(1) << triples[:, col].astype(np.uint64)
    return masks


def _logsumexp_parts(parts: list[tuple[float, float]]) -> float:
    """Combine per-chunk (max, sum exp(x - max)) pairs into one log-sum-exp."""
    m = max(p[0] for p in parts)
    total = sum(math.exp(p[0] - m) * p[1] for p in parts)
    return m + math.log(total)


def log_Z_spin_enumeration(model: IsingModel, cap: int = DEFAULT_ENUM_CAP) -> float:
    """log of the exact partition function by summing all 2**F spin configurations.

    Spin configurations are the bits of 0 .. 2**F - 1 (bit f set means spin
    f is -1); per-vertex triple products are bit parities, vectorized in
    chunks, and the Boltzmann sum is accumulated as a streaming log-sum-exp.

    All 2**F configurations are summed even though the face-selection map
    t -> Bt is 4-to-1 onto the 2**(F-2) codewords (its kernel always has
    dimension 2): the multiplicity is exactly what the gamma prefactor of
    the codeword-sum route accounts for, so configurations must not be
    deduplicated here.
    """
    F = model.colex.face_count
    if F > cap:
        raise CapExceededError(f"spin enumeration over F = {F} faces exceeds cap {cap}")
    masks = _face_masks(model)
    J = model.coupling_array
    beta = model.beta
    parts: list[tuple[float, float]] = []
    total = 1 << F
    for start in range(0, total, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        energies = np.zeros(n.shape[0], dtype=np.float64)
        for a in range(masks.shape[0]):
            parity = (np.bitwise_count(n & masks[a]) & np.uint64(1)).astype(np.float64)
            energies -= J[a] * (1.0 - 2.0 * parity)
        exponents = -beta * energies
        m = float(exponents.max())
        parts.append((m, float(np.exp(exponents - m).sum())))
    return _logsumexp_parts(parts)


def exact_Z_spin_enumeration(model: IsingModel, cap: int = DEFAULT_ENUM_CAP) -> float:
    """Exact partition function by brute-force spin enumeration (2**F terms)."""
    return math.exp(log_Z_spin_enumeration(model, cap))


def log_expectation_codeword_sum(model: IsingModel, cap: int = DEFAULT_ENUM_CAP) -> float:
    """log <Omega|A|Omega> = log sum over codewords u of prod x_a^(1-u_a) y_a^u_a.

    Every term is positive, so the sum is a log-sum-exp over the 2**(F-2)
    codewords of the incidence-matrix column space, walked in Gray order in
    vectorized chunks.
    """
    basis = column_space_basis(incidence_matrix(model.colex))
    k = basis.cols
    if k > cap:
        raise CapExceededError(f"codeword sum over {k} generators exceeds cap {cap}")
    log_x, log_y = _log_amplitudes(model)
    base = float(log_x.sum())
    diff = log_y - log_x
    V = model.colex.vertex_count
    parts: list[tuple[float, float]] = []
    total = 1 << k
    for start in range(0, total, _CHUNK):
        words = codeword_table(basis, cap=cap, start=start, stop=min(start + _CHUNK, total))
        logs = np.full(words.shape[0], base)
        for a in range(V):
            w, s = divmod(a, 64)
            bit = (words[:, w] >> np.uint64(s)) & np.uint64(1)
            logs += diff[a] * bit.astype(np.float64)
        m = float(logs.max())
        parts.append((m, float(np.exp(logs - m).sum())))
    return _logsumexp_parts(parts)


def exact_expectation_codeword_sum(model: IsingModel, cap: int = DEFAULT_ENUM_CAP) -> float:
    """<Omega|A|Omega>, exactly, via the codeword sum; always in (0, 1]."""
    return math.exp(log_expectation_codeword_sum(model, cap))


def log_Z_via_expectation(model: IsingModel, cap: int = DEFAULT_ENUM_CAP) -> float:
    """log Z from the expectation mapping: log gamma - (F-2)/2 ln 2 + log <Omega|A|Omega>."""
    F = model.colex.face_count
    return gamma(model).log - (F - 2) / 2 * LN2 + log_expectation_codeword_sum(model, cap)


def exact_Z_via_expectation(model: IsingModel, cap: int = DEFAULT_ENUM_CAP) -> float:
    """Exact partition function through the expectation route."""
    return math.exp(log_Z_via_expectation(model, cap))


def exact_overlap(
    model: IsingModel,
    cap: int = DEFAULT_ENUM_CAP,
    incremental: bool = True,
) -> float:
    """<Omega|alpha> by direct codeword enumeration in linear arithmetic.

    Deliberately independent of the log-domain codeword sum: products are
    updated incrementally along the Gray-code walk (one multiply by
    y_a / x_a or its inverse per flipped bit) and accumulated with Kahan
    compensation.  `incremental=False` recomputes every product from
    scratch as a correctness cross-check (slow; small lattices only).
    Returns sum_u prod <u_a|alpha_a> / sqrt(2**(F-2)).
    """
    basis = column_space_basis(incidence_matrix(model.colex))
    k = basis.cols
    if k > cap:
        raise CapExceededError(f"codeword enumeration over {k} generators exceeds cap {cap}")
    phases = local_phases(model)
    x = phases.amplitude_x
    y = phases.amplitude_y
    V = model.colex.vertex_count

    total = 0.0
    comp = 0.0  # Kahan compensation

    def add(term: float) -> None:
        nonlocal total, comp
        t = term - comp
        s = total + t
        comp = (s - total) - t
        total = s

    if incremental:
        gens = [g.to_int() for g in _basis_generators(basis)]
        ratio = y / x
        inv_ratio = x / y
        prod = float(np.prod(x))
        cur = 0
        add(prod)
        for i in range(1, 1 << k):
            flip = (i & -i).bit_length() - 1
            g = gens[flip]
            new = cur ^ g
            changed = g
            while changed:
                a = (changed & -changed).bit_length() - 1
                changed &= changed - 1
                prod *= ratio[a] if (new >> a) & 1 else inv_ratio[a]
            cur = new
            add(prod)
    else:
        for u in enumerate_codewords(basis, cap):
            bits = u.to_bits().astype(bool)
            add(float(np.prod(np.where(bits, y, x))))

    return total / math.sqrt(2.0 ** k)


def _basis_generators(basis):
    """Columns of a basis matrix as BitVectors (enumeration helper)."""
    return [basis.column(j) for j in range(basis.cols)]
