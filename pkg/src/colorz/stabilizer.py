"""
Stabilizer-state machinery for CSS states of self-orthogonal codes.

A Tableau holds one Pauli word per generator as packed X/Z bit rows plus a
two-bit phase (the word is i**phase * X(x) Z(z); Hermitian words have
phase == |x & z| mod 2, so canonical signs are +-1).  With that ordering
convention the product of two words only needs one cross inner product:

    [i**r1 X(x1) Z(z1)] [i**r2 X(x2) Z(z2)]
        = i**(r1 + r2 + 2 <z1, x2>) X(x1 ^ x2) Z(z1 ^ z2)

Destabilizer rows are carried alongside the generators so computational
basis measurement resolves deterministic outcomes without fresh Gaussian
elimination.  Tableaux are immutable from the caller's perspective: gates
return new tableaux and sampling clones internally.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .gf2 import (
    BitMatrix,
    BitVector,
    _row_reduce_inplace,
    int_to_words,
    is_self_orthogonal,
    rank as gf2_rank,
    row_reduce,
    unpack_rows,
    word_count,
    words_to_int,
)

GATES = ("H", "P", "Z", "HP")


class NotSelfOrthogonalError(ValueError):
    """The incidence matrix is not self-orthogonal; X and Z parts would clash."""


class Tableau:
    """V commuting, independent, Hermitian Pauli generators of a V-qubit state."""

    __slots__ = ("num_qubits", "xs", "zs", "phases", "dxs", "dzs", "dphases", "_int_cache")

    def __init__(
        self,
        num_qubits: int,
        xs: np.ndarray,
        zs: np.ndarray,
        phases: np.ndarray,
        dxs: np.ndarray,
        dzs: np.ndarray,
        dphases: np.ndarray,
    ):
        self.num_qubits = num_qubits
        self.xs = np.ascontiguousarray(xs, dtype=np.uint64)
        self.zs = np.ascontiguousarray(zs, dtype=np.uint64)
        self.phases = np.ascontiguousarray(phases, dtype=np.uint8)
        self.dxs = np.ascontiguousarray(dxs, dtype=np.uint64)
        self.dzs = np.ascontiguousarray(dzs, dtype=np.uint64)
        self.dphases = np.ascontiguousarray(dphases, dtype=np.uint8)
        self._int_cache: Optional[list[list[int]]] = None

    @property
    def words(self) -> int:
        return word_count(self.num_qubits)

    def copy(self) -> "Tableau":
        return Tableau(
            self.num_qubits,
            self.xs.copy(),
            self.zs.copy(),
            self.phases.copy(),
            self.dxs.copy(),
            self.dzs.copy(),
            self.dphases.copy(),
        )

    def signs(self) -> np.ndarray:
        """Canonical +-1 sign of each generator (phase with the Y factors split off)."""
        ycount = np.bitwise_count(self.xs & self.zs).sum(axis=1)
        r = (self.phases.astype(np.int64) - ycount) % 4
        if not np.isin(r, (0, 2)).all():
            raise ValueError("non-Hermitian generator phase")
        return np.where(r == 0, 1, -1).astype(np.int64)

    def _symplectic_gram(self) -> np.ndarray:
        """(V, V) matrix of symplectic products <x_i, z_j> + <z_i, x_j> mod 2."""
        x = unpack_rows(self.xs, self.num_qubits).astype(np.uint8)
        z = unpack_rows(self.zs, self.num_qubits).astype(np.uint8)
        return ((x.astype(np.int64) @ z.T.astype(np.int64)) + (z.astype(np.int64) @ x.T.astype(np.int64))) % 2

    def verify(self) -> None:
        """Assert the tableau invariants; raises ValueError on violation."""
        V = self.num_qubits
        if self.xs.shape[0] != V:
            raise ValueError(f"{self.xs.shape[0]} generators for {V} qubits")
        if self._symplectic_gram().any():
            raise ValueError("generators do not pairwise commute")
        dense = np.hstack([unpack_rows(self.xs, V), unpack_rows(self.zs, V)])
        if gf2_rank(BitMatrix.from_dense(dense)) != V:
            raise ValueError("generators are not independent")
        self.signs()  # raises if any phase is non-Hermitian
        # destabilizer pairing: d_i anticommutes with s_j iff i == j
        dx = unpack_rows(self.dxs, V).astype(np.int64)
        dz = unpack_rows(self.dzs, V).astype(np.int64)
        sx = unpack_rows(self.xs, V).astype(np.int64)
        sz = unpack_rows(self.zs, V).astype(np.int64)
        pairing = (dx @ sz.T + dz @ sx.T) % 2
        if not np.array_equal(pairing, np.eye(V, dtype=np.int64)):
            raise ValueError("destabilizer pairing broken")

    def _rows_as_ints(self) -> list[list[int]]:
        """[xs, zs, phases, dxs, dzs, dphases] with bit rows as Python ints."""
        if self._int_cache is None:
            self._int_cache = [
                [words_to_int(r) for r in self.xs],
                [words_to_int(r) for r in self.zs],
                [int(p) for p in self.phases],
                [words_to_int(r) for r in self.dxs],
                [words_to_int(r) for r in self.dzs],
                [int(p) for p in self.dphases],
            ]
        return self._int_cache

    def __repr__(self) -> str:
        return f"Tableau({self.num_qubits} qubits)"


def css_tableau(B: BitMatrix, check: bool = True) -> Tableau:
    """Tableau of the uniform superposition over the column space of B.

    Generators are X(u) for a reduced row echelon basis {u} of the column
    space (the code S) followed by Z(v) for the standard free-column basis
    of the orthogonal complement; all signs +1.  Destabilizers are the
    matching single-qubit Z/X words on pivot/free columns.

    Raises NotSelfOrthogonalError unless B^T B = 0 (otherwise the X and Z
    parts would fail to commute).
    """
    if not is_self_orthogonal(B):
        raise NotSelfOrthogonalError("matrix columns are not pairwise/self orthogonal")
    V = B.rows
    W = word_count(V)
    reduced, pivots = row_reduce(B.transpose())  # rows span the column space of B
    k = len(pivots)
    free = [q for q in range(V) if q not in set(pivots)]

    xs = np.zeros((V, W), dtype=np.uint64)
    zs = np.zeros((V, W), dtype=np.uint64)
    dxs = np.zeros((V, W), dtype=np.uint64)
    dzs = np.zeros((V, W), dtype=np.uint64)

    def unit(q: int) -> np.ndarray:
        return int_to_words(1 << q, V)

    # X-type generators on the code basis; destabilizer Z on the pivot qubit
    for i in range(k):
        xs[i] = reduced.words[i]
        dzs[i] = unit(pivots[i])
    # Z-type generators on the dual basis; destabilizer X on the free qubit
    for idx, q in enumerate(free):
        row = k + idx
        v = 1 << q
        for i in range(k):
            if reduced.get(i, q):
                v ^= 1 << pivots[i]
        zs[row] = int_to_words(v, V)
        dxs[row] = unit(q)

    t = Tableau(
        V,
        xs,
        zs,
        np.zeros(V, dtype=np.uint8),
        dxs,
        dzs,
        np.zeros(V, dtype=np.uint8),
    )
    if check:
        t.verify()
    return t


def _bit_of(words: np.ndarray, qubit: int) -> tuple[int, np.uint64]:
    w, s = divmod(qubit, 64)
    return w, np.uint64(s)


def _apply_gate_inplace(t: Tableau, qubit: int, gate: str) -> None:
    w, s = _bit_of(t.xs, qubit)
    one = np.uint64(1)
    for xs, zs, phases in ((t.xs, t.zs, t.phases), (t.dxs, t.dzs, t.dphases)):
        xb = ((xs[:, w] >> s) & one).astype(np.uint8)
        zb = ((zs[:, w] >> s) & one).astype(np.uint8)
        if gate == "H":
            phases += 2 * (xb & zb)
            diff = (xb ^ zb).astype(np.uint64) << s
            xs[:, w] ^= diff
            zs[:, w] ^= diff
        elif gate == "P":
            phases += xb
            zs[:, w] ^= xb.astype(np.uint64) << s
        elif gate == "Z":
            phases += 2 * xb
        else:
            raise ValueError(f"unknown gate {gate!r}")
        phases %= 4


def apply_clifford(t: Tableau, qubit: int, gate: str) -> Tableau:
    """Conjugate every generator by a single-qubit Clifford; returns a new Tableau.

    Gates: H (X<->Z), P = diag(1, i) (X -> iXZ), Z (X -> -X), and the
    composite HP meaning "apply P, then H".
    """
    if not 0 <= qubit < t.num_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    if gate not in GATES:
        raise ValueError(f"gate must be one of {GATES}")
    out = t.copy()
    if gate == "HP":
        _apply_gate_inplace(out, qubit, "P")
        _apply_gate_inplace(out, qubit, "H")
    else:
        _apply_gate_inplace(out, qubit, gate)
    return out


def apply_clifford_all(t: Tableau, gate: str) -> Tableau:
    """Apply the same single-qubit Clifford to every qubit (one array pass)."""
    if gate not in GATES:
        raise ValueError(f"gate must be one of {GATES}")
    out = t.copy()
    steps = ("P", "H") if gate == "HP" else (gate,)
    for step in steps:
        for xs, zs, phases in ((out.xs, out.zs, out.phases), (out.dxs, out.dzs, out.dphases)):
            if step == "H":
                phases += 2 * (np.bitwise_count(xs & zs).sum(axis=1) % 2).astype(np.uint8)
                tmp = xs.copy()
                xs[:] = zs
                zs[:] = tmp
            elif step == "P":
                phases += (np.bitwise_count(xs).sum(axis=1) % 4).astype(np.uint8)
                zs ^= xs
            elif step == "Z":
                phases += 2 * (np.bitwise_count(xs).sum(axis=1) % 2).astype(np.uint8)
            phases %= 4
    return out


def _measure_all_ints(
    xs: list[int],
    zs: list[int],
    ph: list[int],
    dxs: list[int],
    dzs: list[int],
    num_qubits: int,
    coin: Callable[[], int],
) -> int:
    """Measure qubits 0..V-1 in order on int-encoded rows (destructive).

    Random outcomes come from `coin`; when several generators anticommute
    with Z_q the lowest-index one is the pivot.  Deterministic outcomes are
    resolved through the destabilizer rows.  Returns the packed outcome.
    """
    V = num_qubits
    out = 0
    for q in range(V):
        bit = 1 << q
        pivot = -1
        for i in range(V):
            if xs[i] & bit:
                pivot = i
                break
        if pivot >= 0:
            px, pz, pp = xs[pivot], zs[pivot], ph[pivot]
            for i in range(V):
                if i != pivot and (xs[i] & bit):
                    ph[i] = (ph[i] + pp + 2 * (pz & xs[i]).bit_count()) & 3
                    xs[i] ^= px
                    zs[i] ^= pz
                if dxs[i] & bit:
                    dxs[i] ^= px
                    dzs[i] ^= pz
            outcome = coin() & 1
            dxs[pivot], dzs[pivot] = px, pz
            xs[pivot], zs[pivot], ph[pivot] = 0, bit, 2 * outcome
        else:
            acc_x = acc_z = acc_p = 0
            for i in range(V):
                if dxs[i] & bit:
                    acc_p = (acc_p + ph[i] + 2 * (acc_z & xs[i]).bit_count()) & 3
                    acc_x ^= xs[i]
                    acc_z ^= zs[i]
            assert acc_x == 0 and acc_z == bit and acc_p in (0, 2)
            outcome = acc_p >> 1
        if outcome:
            out |= bit
    return out


def sample_basis(t: Tableau, rng: np.random.Generator) -> BitVector:
    """Draw one computational-basis outcome x with probability |<x|psi>|^2.

    Measures qubits Z by Z on a fresh clone of the generator rows; the
    source tableau is untouched, so identical seeds reproduce identical
    sample sequences.  Worst case O(V^3) bit operations per sample.
    """
    base = t._rows_as_ints()
    xs, zs, ph = list(base[0]), list(base[1]), list(base[2])
    dxs, dzs = list(base[3]), list(base[4])
    value = _measure_all_ints(
        xs, zs, ph, dxs, dzs, t.num_qubits, lambda: int(rng.integers(0, 2))
    )
    return BitVector.from_int(t.num_qubits, value)


def sample_basis_batch(t: Tableau, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` independent sample_basis draws, packed as a (count, words) array."""
    W = t.words
    out = np.zeros((count, W), dtype=np.uint64)
    base = t._rows_as_ints()
    V = t.num_qubits
    for k in range(count):
        xs, zs, ph = list(base[0]), list(base[1]), list(base[2])
        dxs, dzs = list(base[3]), list(base[4])
        value = _measure_all_ints(xs, zs, ph, dxs, dzs, V, lambda: int(rng.integers(0, 2)))
        out[k] = int_to_words(value, V)
    return out


class SupportSampler:
    """Bulk sampler over the computational-basis support of a stabilizer state.

    The outcome distribution of measuring every qubit is uniform over an
    affine subspace x0 + span(W), where W is the row space of the generator
    X parts and x0 is any reachable outcome (here: the measurement result
    with every coin pinned to 0).  Each draw is then one random subset XOR,
    so bulk sampling costs O(V^2 / 64) per sample after O(V^3 / 64) setup.
    Draws exactly the sample_basis distribution.
    """

    def __init__(self, t: Tableau):
        self.num_qubits = t.num_qubits
        self.words = t.words
        base = t._rows_as_ints()
        xs, zs, ph = list(base[0]), list(base[1]), list(base[2])
        dxs, dzs = list(base[3]), list(base[4])
        x0 = _measure_all_ints(xs, zs, ph, dxs, dzs, t.num_qubits, lambda: 0)
        self.offset = int_to_words(x0, t.num_qubits)
        span = t.xs.copy()
        npiv = len(_row_reduce_inplace(span, t.num_qubits))
        self.basis = span[:npiv].copy()

    @property
    def support_dim(self) -> int:
        return self.basis.shape[0]

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """(count, words) packed outcomes, i.i.d. uniform over the support."""
        out = np.tile(self.offset, (count, 1))
        d = self.basis.shape[0]
        if d:
            picks = rng.integers(0, 2, size=(count, d), dtype=np.uint8).astype(bool)
            for i in range(d):
                col = picks[:, i]
                if col.any():
                    out[col] ^= self.basis[i][None, :]
        return out
