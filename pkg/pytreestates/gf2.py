# -*- coding: utf-8 -*-
"""
Linear algebra over GF(2) on bit matrices packed into 64-bit words.

Classes:

    BitMatrix
    Coset

Bit vectors are uint8 arrays of 0/1. Where a vector stands for an n-qubit basis
state, its basis index is sum_i x_i 2^(n-i) (first entry most significant).
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from pytreestates import settings
from pytreestates.errors import DimensionMismatchError, EmptyCosetError, OversizeError, ParameterError
from pytreestates.streams import random_bits, trial_rng

logger = logging.getLogger(__name__)

WORD = 64
_ONE = np.uint64(1)


def _pack(array: np.ndarray) -> np.ndarray:
    """(k, n) 0/1 array -> (k, ceil(n/64)) uint64 words, column j at bit j % 64 of word j // 64."""
    k, n = array.shape
    width = max(1, -(-n // WORD)) * WORD
    if k == 0:
        return np.zeros((0, width // WORD), dtype=np.uint64)
    padded = np.zeros((k, width), dtype=np.uint8)
    padded[:, :n] = array
    return np.packbits(padded, axis=1, bitorder='little').view('<u8').astype(np.uint64)


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    k = words.shape[0]
    if k == 0:
        return np.zeros((0, n), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype('<u8')).view(np.uint8).reshape(k, -1)
    return np.unpackbits(as_bytes, axis=1, bitorder='little')[:, :n]


def bits_to_index(bits: Sequence[int]) -> int:
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index: int, n: int) -> np.ndarray:
    return np.array([(index >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def rank_of_ints(vectors: Iterable[int]) -> int:
    """Rank of integers read as GF(2) vectors (xor basis keyed by leading bit)."""
    basis = {}
    for v in vectors:
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = v
                break
            v ^= basis[top]
    return len(basis)


class BitMatrix:
    """
    k x n matrix over GF(2), stored row-major in packed uint64 words.
    """

    def __init__(self, words: np.ndarray, n_cols: int):
        words = np.asarray(words, dtype=np.uint64)
        assert words.ndim == 2, "packed words must be two dimensional"
        if n_cols < 1:
            raise ParameterError(f"bit matrices need at least one column, got {n_cols}")
        self.words = words
        self.n_cols = n_cols

    @classmethod
    def from_array(cls, array) -> "BitMatrix":
        array = np.asarray(array, dtype=np.uint8)
        if array.ndim != 2:
            raise DimensionMismatchError(f"expected a two dimensional 0/1 array, got shape {array.shape}")
        if np.any(array > 1):
            raise ParameterError("bit matrix entries must be 0 or 1")
        return cls(_pack(array), array.shape[1])

    @classmethod
    def from_strings(cls, rows: Sequence[str], n_cols: Optional[int] = None) -> "BitMatrix":
        if n_cols is None:
            if not rows:
                raise ParameterError("column count of an empty matrix must be given")
            n_cols = len(rows[0])
        array = np.zeros((len(rows), n_cols), dtype=np.uint8)
        for r, row in enumerate(rows):
            if len(row) != n_cols or set(row) - {'0', '1'}:
                raise ParameterError(f"row '{row}' is not {n_cols} characters of 0/1")
            array[r] = [int(ch) for ch in row]
        return cls.from_array(array)

    @classmethod
    def zeros(cls, k: int, n: int) -> "BitMatrix":
        return cls.from_array(np.zeros((k, n), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self.words.shape[0]

    @property
    def cols(self) -> int:
        return self.n_cols

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def to_array(self) -> np.ndarray:
        return _unpack(self.words, self.n_cols)

    def row_strings(self) -> List[str]:
        return [''.join(str(int(b)) for b in row) for row in self.to_array()]

    def column_ints(self) -> List[int]:
        """Column j as an integer with bit r set iff A[r, j] = 1."""
        array = self.to_array()
        weights = [1 << r for r in range(self.rows)]
        return [sum(w for w, b in zip(weights, array[:, j]) if b) for j in range(self.cols)]

    def columns(self, cols: Sequence[int]) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array()[:, list(cols)])

    def select_rows(self, rows: Sequence[int]) -> "BitMatrix":
        return BitMatrix(self.words[list(rows)], self.n_cols)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_array(self.to_array().T)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.uint8)
        if x.shape != (self.cols,):
            raise DimensionMismatchError(f"vector of length {x.shape} for {self.cols} columns")
        return (self.to_array().astype(np.int64) @ x) % 2

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        product = (self.to_array().astype(np.int64) @ other.to_array().astype(np.int64)) % 2
        return BitMatrix.from_array(product)

    def hamming_weight(self) -> int:
        return int(self.to_array().sum())

    def __eq__(self, other):
        """Overrides the default implementation"""
        if isinstance(other, BitMatrix):
            return self.shape == other.shape and np.array_equal(self.to_array(), other.to_array())
        return NotImplemented

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"

    @cached_property
    def echelon(self) -> Tuple[np.ndarray, Tuple[int, ...]]:
        """Reduced row echelon form as (packed words, pivot columns)."""
        return _row_reduce(self.words, self.n_cols)


def _row_reduce(words: np.ndarray, n_cols: int) -> Tuple[np.ndarray, Tuple[int, ...]]:
    words = words.copy()
    k = words.shape[0]
    pivots = []
    rank = 0
    for col in range(n_cols):
        if rank == k:
            break
        w, b = divmod(col, WORD)
        shift = np.uint64(b)
        hits = np.flatnonzero((words[rank:, w] >> shift) & _ONE)
        if hits.size == 0:
            continue
        p = rank + int(hits[0])
        if p != rank:
            words[[rank, p]] = words[[p, rank]]
        mask = ((words[:, w] >> shift) & _ONE).astype(bool)
        mask[rank] = False
        words[mask] ^= words[rank]
        pivots.append(col)
        rank += 1
    return words, tuple(pivots)


# ========================================================================
# ============================== operations ==============================
# ========================================================================
def rank_gf2(a: BitMatrix) -> int:
    return len(a.echelon[1])


def kernel_basis(a: BitMatrix) -> List[np.ndarray]:
    """
    Basis of {x : Ax = 0}, one vector per free column, n - rank(A) vectors.
    """
    words, pivots = a.echelon
    reduced = _unpack(words, a.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(a.cols):
        if free in pivot_set:
            continue
        x = np.zeros(a.cols, dtype=np.uint8)
        x[free] = 1
        for r, p in enumerate(pivots):
            x[p] = reduced[r, free]
        basis.append(x)
    return basis


def solve(a: BitMatrix, b) -> Optional[np.ndarray]:
    """
    A particular solution of Ax = b (free variables set to 0), or None.
    """
    b = np.asarray(b, dtype=np.uint8).reshape(-1)
    if b.shape[0] != a.rows:
        raise DimensionMismatchError(f"right hand side of length {b.shape[0]} for {a.rows} rows")
    augmented = np.hstack([a.to_array(), b.reshape(-1, 1)])
    words, pivots = _row_reduce(_pack(augmented), a.cols + 1)
    if pivots and pivots[-1] == a.cols:
        return None
    reduced = _unpack(words, a.cols + 1)
    x = np.zeros(a.cols, dtype=np.uint8)
    for r, p in enumerate(pivots):
        x[p] = reduced[r, a.cols]
    return x


def is_invertible(a: BitMatrix) -> bool:
    if a.rows != a.cols:
        raise DimensionMismatchError(f"invertibility needs a square matrix, got {a.shape}")
    return rank_gf2(a) == a.cols


def random_bitmatrix(k: int, n: int, seed: int = 0, trial: int = 0,
                     rng: Optional[np.random.Generator] = None) -> BitMatrix:
    """
    Uniform k x n matrix from the Philox stream of (seed, trial), or from rng when given.
    """
    rng = trial_rng(seed, trial) if rng is None else rng
    return BitMatrix.from_array(random_bits(rng, (k, n)))


def invertibility_product(k: int) -> float:
    """Probability that a uniform k x k matrix over GF(2) is invertible: prod_{i=1..k} (1 - 2^-i)."""
    product = 1.0
    for i in range(1, k + 1):
        product *= 1 - 2.0 ** -i
    return product


# ========================================================================
# ================================ cosets ================================
# ========================================================================
@dataclass(frozen=True, eq=False)
class Coset:
    """
    C = {x : Ax = b}.
    """
    a: BitMatrix
    b: np.ndarray

    @classmethod
    def checked(cls, a: BitMatrix, b=None) -> "Coset":
        """
        :raises EmptyCosetError: if Ax = b has no solution
        """
        b = np.zeros(a.rows, dtype=np.uint8) if b is None else np.asarray(b, dtype=np.uint8).reshape(-1)
        if solve(a, b) is None:
            raise EmptyCosetError("Ax = b has no solution")
        return cls(a, b)

    @property
    def n(self) -> int:
        return self.a.cols

    @property
    def dimension(self) -> int:
        """log2 |C|"""
        return self.n - rank_gf2(self.a)

    def contains(self, x) -> bool:
        return bool(np.array_equal(self.a.matvec(x), self.b))


def coset_indices(c: Coset, cap: int = settings.COSET_CAP) -> np.ndarray:
    """
    Sorted basis indices of all members of C.

    :raises OversizeError: if |C| > cap
    :raises EmptyCosetError: if C is empty
    """
    size_log2 = c.dimension
    if 2 ** size_log2 > cap:
        raise OversizeError(f"coset has 2^{size_log2} elements, cap is {cap}")
    particular = solve(c.a, c.b)
    if particular is None:
        raise EmptyCosetError("Ax = b has no solution")
    members = np.array([bits_to_index(particular)], dtype=np.int64)
    for vector in kernel_basis(c.a):
        members = np.concatenate([members, members ^ bits_to_index(vector)])
    return np.sort(members)


def enumerate_coset(c: Coset, cap: int = settings.COSET_CAP) -> np.ndarray:
    """
    All members of C in lexicographic order, as rows of a (|C|, n) uint8 array.
    """
    indices = coset_indices(c, cap)
    shifts = np.arange(c.n - 1, -1, -1)
    return ((indices[:, None] >> shifts) & 1).astype(np.uint8)


# ========================================================================
# =============================== text format ============================
# ========================================================================
def parse_matrix_text(text: str) -> Tuple[BitMatrix, Optional[np.ndarray]]:
    """
    Matrix text format: "k n", k rows of n characters 0/1, optional "b " line of k characters.

    :return: (A, b or None)
    """
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line and not line.startswith('#')]
    if not lines:
        raise ParameterError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2 or not all(part.isdigit() for part in header):
        raise ParameterError(f"matrix header must be 'k n', got '{lines[0]}'")
    k, n = int(header[0]), int(header[1])
    rows = lines[1:1 + k]
    if len(rows) != k:
        raise ParameterError(f"expected {k} matrix rows, got {len(rows)}")
    a = BitMatrix.from_strings(rows, n)
    b = None
    rest = lines[1 + k:]
    if rest:
        parts = rest[0].split()
        if parts[0] != 'b' or len(rest) > 1:
            raise ParameterError(f"unexpected trailing line '{rest[0]}'")
        value = parts[1] if len(parts) > 1 else ''
        if len(value) != k or set(value) - {'0', '1'}:
            raise ParameterError(f"coset vector must be {k} characters of 0/1")
        b = np.array([int(ch) for ch in value], dtype=np.uint8)
    return a, b


def format_matrix_text(a: BitMatrix, b=None) -> str:
    lines = [f"{a.rows} {a.cols}"] + a.row_strings()
    if b is not None:
        lines.append('b ' + ''.join(str(int(v)) for v in b))
    return '\n'.join(lines) + '\n'


def row_space_indices(a: BitMatrix, cap: int = settings.COSET_CAP) -> np.ndarray:
    """
    Sorted basis indices of all 2^rank(A) vectors in the row space of A.
    """
    words, pivots = a.echelon
    if 2 ** len(pivots) > cap:
        raise OversizeError(f"row space has 2^{len(pivots)} elements, cap is {cap}")
    span = np.zeros(1, dtype=np.int64)
    for row in _unpack(words[:len(pivots)], a.cols):
        span = np.concatenate([span, span ^ bits_to_index(row)])
    return np.sort(span)


def parity_matrix(n: int) -> BitMatrix:
    """1 x n all-ones matrix; its kernel is the even-parity subgroup."""
    return BitMatrix.from_array(np.ones((1, n), dtype=np.uint8))


def cat_matrix(n: int) -> BitMatrix:
    """(n-1) x n matrix of adjacent parities x_i + x_(i+1); its kernel is {0^n, 1^n}."""
    array = np.zeros((n - 1, n), dtype=np.uint8)
    for i in range(n - 1):
        array[i, i] = array[i, i + 1] = 1
    return BitMatrix.from_array(array)
