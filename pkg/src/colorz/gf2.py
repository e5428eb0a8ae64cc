"""
Dense bit-packed linear algebra over GF(2).

Bits are stored little-endian in uint64 words: bit ``j`` of a row lives in
word ``j // 64`` at position ``j % 64``.  Elimination routines work
word-parallel with XOR row updates on a copy; public functions never mutate
their inputs.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

import numpy as np

WORD_BITS = 64

#: Largest number of independent generators exhaustive codeword enumeration
#: will accept by default (2**24 codewords).
DEFAULT_ENUM_CAP = 24


class CapExceededError(ValueError):
    """An exhaustive computation would exceed its configured size cap."""


def word_count(nbits: int) -> int:
    """Number of uint64 words needed to hold `nbits` bits."""
    return (nbits + WORD_BITS - 1) // WORD_BITS


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a (rows, nbits) 0/1 array into (rows, words) uint64, little-endian."""
    arr = np.atleast_2d(np.asarray(bits, dtype=np.uint8) & 1)
    nbits = arr.shape[1]
    nwords = word_count(nbits)
    packed8 = np.packbits(arr, axis=1, bitorder="little")
    padded = np.zeros((arr.shape[0], nwords * 8), dtype=np.uint8)
    padded[:, : packed8.shape[1]] = packed8
    return padded.view(np.uint64)


def unpack_rows(words: np.ndarray, nbits: int) -> np.ndarray:
    """Unpack (rows, words) uint64 into a (rows, nbits) uint8 array of bits."""
    words = np.atleast_2d(np.ascontiguousarray(words, dtype=np.uint64))
    as_bytes = words.view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :nbits]


def _get_bit_column(words: np.ndarray, j: int) -> np.ndarray:
    """Bit `j` of every packed row, as a uint64 0/1 vector."""
    w, s = divmod(j, WORD_BITS)
    return (words[:, w] >> np.uint64(s)) & np.uint64(1)


def words_to_int(words: np.ndarray) -> int:
    """Little-endian packed words -> arbitrary-precision Python int."""
    return int.from_bytes(np.ascontiguousarray(words, dtype=np.uint64).tobytes(), "little")


def int_to_words(value: int, nbits: int) -> np.ndarray:
    """Python int -> little-endian packed uint64 words of width `nbits`."""
    nwords = word_count(nbits)
    raw = value.to_bytes(nwords * 8, "little")
    return np.frombuffer(raw, dtype=np.uint64).copy()


class BitVector:
    """A fixed-length vector over GF(2), packed into uint64 words."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: Optional[np.ndarray] = None):
        if length < 0:
            raise ValueError("length must be non-negative")
        self.length = length
        if words is None:
            self.words = np.zeros(word_count(length), dtype=np.uint64)
        else:
            self.words = np.ascontiguousarray(words, dtype=np.uint64)
            if self.words.shape != (word_count(length),):
                raise ValueError("word buffer does not match length")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        arr = np.asarray(list(bits), dtype=np.uint8)
        return cls(arr.shape[0], pack_rows(arr.reshape(1, -1))[0])

    @classmethod
    def from_int(cls, length: int, value: int) -> "BitVector":
        if value < 0 or value >> length:
            raise ValueError("value does not fit in the requested length")
        return cls(length, int_to_words(value, length))

    def copy(self) -> "BitVector":
        return BitVector(self.length, self.words.copy())

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        w, s = divmod(j, WORD_BITS)
        return int(self.words[w] >> np.uint64(s)) & 1

    def __setitem__(self, j: int, value: int) -> None:
        if not 0 <= j < self.length:
            raise IndexError(j)
        w, s = divmod(j, WORD_BITS)
        if value & 1:
            self.words[w] |= np.uint64(1) << np.uint64(s)
        else:
            self.words[w] &= ~(np.uint64(1) << np.uint64(s))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.words ^ other.words)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitVector)
            and self.length == other.length
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.length, self.to_int()))

    def weight(self) -> int:
        """Hamming weight."""
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def dot(self, other: "BitVector") -> int:
        """Inner product mod 2."""
        if self.length != other.length:
            raise ValueError("length mismatch")
        return int(np.bitwise_count(self.words & other.words).sum()) & 1

    def to_int(self) -> int:
        return words_to_int(self.words)

    def to_bits(self) -> np.ndarray:
        return unpack_rows(self.words.reshape(1, -1), self.length)[0]

    def __repr__(self) -> str:
        bits = "".join(str(b) for b in self.to_bits()[:72])
        if self.length > 72:
            bits += "..."
        return f"BitVector({self.length}, '{bits}')"


class BitMatrix:
    """A rows x cols matrix over GF(2) with bit-packed rows."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: Optional[np.ndarray] = None):
        if rows < 0 or cols < 0:
            raise ValueError("dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        shape = (rows, word_count(cols))
        if words is None:
            self.words = np.zeros(shape, dtype=np.uint64)
        else:
            self.words = np.ascontiguousarray(words, dtype=np.uint64)
            if self.words.shape != shape:
                raise ValueError("word buffer does not match dimensions")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        for i in range(n):
            m.set(i, i, 1)
        return m

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=np.uint8))
        return cls(arr.shape[0], arr.shape[1], pack_rows(arr))

    @classmethod
    def from_rows(cls, rows: Iterable[BitVector]) -> "BitMatrix":
        rows = list(rows)
        if not rows:
            raise ValueError("from_rows needs at least one row; use zeros() otherwise")
        cols = rows[0].length
        m = cls(len(rows), cols)
        for i, r in enumerate(rows):
            if r.length != cols:
                raise ValueError("rows have inconsistent lengths")
            m.words[i] = r.words
        return m

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.words.copy())

    def get(self, i: int, j: int) -> int:
        w, s = divmod(j, WORD_BITS)
        return int(self.words[i, w] >> np.uint64(s)) & 1

    def set(self, i: int, j: int, value: int) -> None:
        w, s = divmod(j, WORD_BITS)
        if value & 1:
            self.words[i, w] |= np.uint64(1) << np.uint64(s)
        else:
            self.words[i, w] &= ~(np.uint64(1) << np.uint64(s))

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.words[i].copy())

    def column(self, j: int) -> BitVector:
        v = BitVector(self.rows)
        w, s = divmod(j, WORD_BITS)
        bits = (self.words[:, w] >> np.uint64(s)) & np.uint64(1)
        for i in np.nonzero(bits)[0]:
            v[int(i)] = 1
        return v

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        return unpack_rows(self.words, self.cols)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def mat_vec(self, v: BitVector) -> BitVector:
        """Matrix-vector product m @ v over GF(2) (v indexed by columns)."""
        if v.length != self.cols:
            raise ValueError("length mismatch")
        if self.rows == 0:
            return BitVector(0)
        parities = np.bitwise_count(self.words & v.words[None, :]).sum(axis=1) & 1
        return BitVector(self.rows, pack_rows(parities.astype(np.uint8).reshape(1, -1))[0])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.words, other.words))
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def _row_reduce_inplace(words: np.ndarray, cols: int) -> list[int]:
    """Reduce packed rows to RREF in place; returns the pivot column list."""
    nrows = words.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == nrows:
            break
        col = _get_bit_column(words, c)
        hits = np.nonzero(col[r:])[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
            col = _get_bit_column(words, c)
        col[r] = 0
        targets = np.nonzero(col)[0]
        if targets.size:
            words[targets] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def row_reduce(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form of `m` (computed on a copy) and its pivot columns."""
    words = m.words.copy()
    pivots = _row_reduce_inplace(words, m.cols)
    return BitMatrix(m.rows, m.cols, words), pivots


def rank(m: BitMatrix) -> int:
    """GF(2) rank via Gaussian elimination; `m` is not mutated."""
    words = m.words.copy()
    return len(_row_reduce_inplace(words, m.cols))


def is_self_orthogonal(m: BitMatrix) -> bool:
    """True iff m^T m = 0 over GF(2): all column pairs (incl. self) overlap evenly."""
    if m.cols == 0:
        return True
    cols = m.transpose()  # one packed row per original column
    for i in range(m.cols):
        overlaps = np.bitwise_count(cols.words & cols.words[i][None, :]).sum(axis=1) & 1
        if overlaps.any():
            return False
    return True


def column_space_basis(m: BitMatrix) -> BitMatrix:
    """Linearly independent columns of `m` spanning its column space.

    Columns are scanned left to right and kept when independent of those
    already kept, so the result reproduces original columns (deterministic).
    Returned matrix has shape (m.rows, rank).
    """
    kept: list[int] = []
    ech: list[tuple[int, int]] = []  # (pivot bit, reduced column as int)
    for j in range(m.cols):
        v = m.column(j).to_int()
        for pivot, vec in ech:
            if (v >> pivot) & 1:
                v ^= vec
        if v:
            pivot = v.bit_length() - 1
            ech.append((pivot, v))
            ech.sort(key=lambda t: -t[0])
            kept.append(j)
    out = BitMatrix(m.rows, len(kept))
    for new_j, j in enumerate(kept):
        w, s = divmod(j, WORD_BITS)
        bits = (m.words[:, w] >> np.uint64(s)) & np.uint64(1)
        tw, ts = divmod(new_j, WORD_BITS)
        out.words[:, tw] |= bits << np.uint64(ts)
    return out


def nullspace_basis(m: BitMatrix) -> BitMatrix:
    """Basis of the kernel {v : m v = 0}, one basis vector per row.

    The returned matrix has shape (m.cols - rank, m.cols); an empty basis is
    a 0-row matrix.  Standard free-column construction from the RREF.
    """
    reduced, pivots = row_reduce(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    out = BitMatrix(len(free), m.cols)
    for i, q in enumerate(free):
        out.set(i, q, 1)
        qw, qs = divmod(q, WORD_BITS)
        qbits = (reduced.words[: len(pivots), qw] >> np.uint64(qs)) & np.uint64(1)
        for k in np.nonzero(qbits)[0]:
            out.set(i, pivots[int(k)], 1)
    return out


class MembershipSolver:
    """Preprocessed column-space membership and solve queries against one matrix.

    Builds a mutually reduced column echelon with combination tracking once;
    solve/membership queries after that cost O(rank) word passes each.
    """

    def __init__(self, m: BitMatrix):
        self.rows = m.rows
        self.cols = m.cols
        # parallel lists: pivot bit, reduced column (int), combination (int over cols)
        pivots: list[int] = []
        vecs: list[int] = []
        combos: list[int] = []
        for j in range(m.cols):
            v = m.column(j).to_int()
            c = 1 << j
            for k, p in enumerate(pivots):
                if (v >> p) & 1:
                    v ^= vecs[k]
                    c ^= combos[k]
            if v == 0:
                continue
            p = v.bit_length() - 1
            # keep the table mutually reduced so queries are order-independent
            for k in range(len(pivots)):
                if (vecs[k] >> p) & 1:
                    vecs[k] ^= v
                    combos[k] ^= c
            pivots.append(p)
            vecs.append(v)
            combos.append(c)
        self._pivots = pivots
        self._vecs = vecs
        self._combos = combos
        self._vec_words = (
            np.stack([int_to_words(v, m.rows) for v in vecs])
            if vecs
            else np.zeros((0, word_count(m.rows)), dtype=np.uint64)
        )

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def solve(self, x: BitVector) -> Optional[BitVector]:
        """Some t with m @ t = x, or None when x is outside the column space."""
        if x.length != self.rows:
            raise ValueError("length mismatch")
        v = x.to_int()
        c = 0
        for k, p in enumerate(self._pivots):
            if (v >> p) & 1:
                v ^= self._vecs[k]
                c ^= self._combos[k]
        if v != 0:
            return None
        return BitVector.from_int(self.cols, c)

    def contains(self, x: BitVector) -> bool:
        return self.solve(x) is not None

    def contains_batch(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized membership for packed rows (k, words) -> bool (k,)."""
        residual = np.ascontiguousarray(xs, dtype=np.uint64).copy()
        for k, p in enumerate(self._pivots):
            mask = _get_bit_column(residual, p).astype(bool)
            if mask.any():
                residual[mask] ^= self._vec_words[k][None, :]
        return ~residual.any(axis=1)


def solve_membership(m: BitMatrix, x: BitVector) -> Optional[BitVector]:
    """Some t with m @ t = x if x lies in the column space of m, else None.

    One-shot convenience wrapper; use MembershipSolver for repeated queries
    against the same matrix.
    """
    return MembershipSolver(m).solve(x)


def _basis_rows_from_columns(basis: BitMatrix) -> np.ndarray:
    """Packed row per basis column, i.e. the transpose's word array."""
    t = basis.transpose()
    return t.words if basis.cols else np.zeros((0, word_count(basis.rows)), dtype=np.uint64)


def enumerate_codewords(
    basis: BitMatrix, cap: int = DEFAULT_ENUM_CAP
) -> Iterator[BitVector]:
    """Stream all 2**k span elements of the k columns of `basis`.

    Outputs follow binary-reflected Gray order: consecutive codewords differ
    by exactly one basis column, starting from the zero vector.  Columns must
    be independent for outputs to be distinct.

    Raises CapExceededError when k exceeds `cap`.
    """
    k = basis.cols
    if k > cap:
        raise CapExceededError(f"codeword enumeration over {k} generators exceeds cap {cap}")
    gens = [words_to_int(row) for row in _basis_rows_from_columns(basis)]
    n = basis.rows
    cur = 0
    yield BitVector.from_int(n, cur)
    for i in range(1, 1 << k):
        flip = (i & -i).bit_length() - 1  # count trailing zeros
        cur ^= gens[flip]
        yield BitVector.from_int(n, cur)


def codeword_table(
    basis: BitMatrix,
    cap: int = DEFAULT_ENUM_CAP,
    start: int = 0,
    stop: Optional[int] = None,
) -> np.ndarray:
    """Packed (count, words) table of span elements in Gray enumeration order.

    `start`/`stop` select a slice of the full 2**k sequence so callers can
    process the span in bounded-memory chunks.
    """
    k = basis.cols
    if k > cap:
        raise CapExceededError(f"codeword enumeration over {k} generators exceeds cap {cap}")
    total = 1 << k
    if stop is None:
        stop = total
    if not (0 <= start <= stop <= total):
        raise ValueError("bad slice bounds")
    gens = _basis_rows_from_columns(basis)
    idx = np.arange(start, stop, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    out = np.zeros((stop - start, word_count(basis.rows)), dtype=np.uint64)
    for i in range(k):
        mask = ((gray >> np.uint64(i)) & np.uint64(1)).astype(bool)
        if mask.any():
            out[mask] ^= gens[i][None, :]
    return out
