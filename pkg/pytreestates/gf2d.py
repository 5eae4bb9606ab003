# -*- coding: utf-8 -*-
"""
Binary extension fields GF(2^d), the Hadamard code, and the binary Vandermonde
matrix obtained by Hadamard-encoding the multiplication maps of a Reed-Solomon generator.

Classes:

    GF2dField
    VandermondeParams

Field elements are ints whose bit i is the coefficient of x^i.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List

import numpy as np

from pytreestates.errors import OversizeError, ParameterError
from pytreestates.gf2 import BitMatrix

logger = logging.getLogger(__name__)

MAX_DEGREE = 16
MAX_EXHAUSTIVE_BITS = 20


def _poly_mod(a: int, m: int) -> int:
    degree = m.bit_length() - 1
    while a.bit_length() - 1 >= degree:
        a ^= m << (a.bit_length() - 1 - degree)
    return a


def is_irreducible(poly: int) -> bool:
    """Exhaustive factor search: no polynomial of degree 1..d/2 divides poly."""
    degree = poly.bit_length() - 1
    if degree < 1:
        return False
    for divisor in range(2, 1 << (degree // 2 + 1)):
        if _poly_mod(poly, divisor) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(d: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree d."""
    if not 1 <= d <= MAX_DEGREE:
        raise ParameterError(f"field degree must lie in 1..{MAX_DEGREE}, got {d}")
    for poly in range(1 << d, 1 << (d + 1)):
        if is_irreducible(poly):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {d}")


@dataclass(frozen=True)
class GF2dField:
    """
    GF(2^d) as polynomials over GF(2) modulo an irreducible of degree d.
    """
    d: int
    irreducible: int

    @classmethod
    def of_degree(cls, d: int) -> "GF2dField":
        return cls(d, smallest_irreducible(d))

    def __post_init__(self):
        if self.irreducible.bit_length() - 1 != self.d:
            raise ParameterError(f"modulus {bin(self.irreducible)} does not have degree {self.d}")
        if not is_irreducible(self.irreducible):
            raise ParameterError(f"modulus {bin(self.irreducible)} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.d

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ParameterError(f"{a} is not an element of GF(2^{self.d})")
        return a

    def power(self, a: int, exponent: int) -> int:
        result = 1
        for _ in range(exponent):
            result = gf2d_mul(self, result, a)
        return result


def gf2d_mul(field: GF2dField, a: int, b: int) -> int:
    field.check(a)
    field.check(b)
    product = 0
    while b:
        if b & 1:
            product ^= a
        b >>= 1
        a <<= 1
    return _poly_mod(product, field.irreducible)


def element_bits(field: GF2dField, a: int) -> np.ndarray:
    """Coefficient vector (entry i = coefficient of x^i)."""
    return np.array([(a >> i) & 1 for i in range(field.d)], dtype=np.uint8)


def bits_element(bits) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def mult_matrix(field: GF2dField, a: int) -> BitMatrix:
    """
    d x d matrix m(a) with m(a) q = coefficient vector of a*q; column j is a*x^j.
    """
    columns = [element_bits(field, gf2d_mul(field, a, 1 << j)) for j in range(field.d)]
    return BitMatrix.from_array(np.stack(columns, axis=1))


def _hadamard_rows(d: int) -> np.ndarray:
    """2^d x d matrix whose row u holds the bits of u (entry i = bit i)."""
    u = np.arange(1 << d)
    return ((u[:, None] >> np.arange(d)) & 1).astype(np.uint8)


def hadamard_encode(v) -> np.ndarray:
    """
    Hadamard codeword of a d-bit vector: entry u is <v, u> mod 2 for u in {0,1}^d.
    """
    v = np.asarray(v, dtype=np.uint8)
    return ((_hadamard_rows(v.shape[0]).astype(np.int64) @ v) % 2).astype(np.uint8)


def hadamard_block(m: BitMatrix) -> np.ndarray:
    """2^d x d block Hm(M) with Hm(M) q = hadamard_encode(M q)."""
    rows = _hadamard_rows(m.rows).astype(np.int64)
    return ((rows @ m.to_array().astype(np.int64)) % 2).astype(np.uint8)


@dataclass(frozen=True)
class VandermondeParams:
    """
    n labels 1..n in GF(2^d), Reed-Solomon dimension k, slack c for random row selections.
    """
    n: int
    k: int
    d: int
    c: int = 0

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DEGREE:
            raise ParameterError(f"field degree must lie in 1..{MAX_DEGREE}, got {self.d}")
        if not 1 <= self.n < (1 << self.d):
            raise ParameterError(f"labels 1..{self.n} do not fit into GF(2^{self.d})")
        if not 1 <= self.k < self.n:
            raise ParameterError(f"need 1 <= k < n, got k={self.k}, n={self.n}")
        if self.c < 0:
            raise ParameterError(f"slack c must be non-negative, got {self.c}")

    @property
    def rows(self) -> int:
        return self.n << self.d

    @property
    def cols(self) -> int:
        return self.k * self.d

    @property
    def weight_bound(self) -> int:
        """(n - k) 2^(d-1), the guaranteed weight of every nonzero image."""
        return (self.n - self.k) << (self.d - 1)


def build_binary_vandermonde(params: VandermondeParams) -> BitMatrix:
    """
    (n 2^d) x (k d) matrix whose block (i, j) is Hm(m(i^j)), i = 1..n, j = 0..k-1.
    For u = (u_0, ..., u_(k-1)) in GF(2^d)^k, block row i of V_bin u is the Hadamard
    codeword of p(i) = sum_j u_j i^j.
    """
    field = GF2dField.of_degree(params.d)
    block_rows: List[np.ndarray] = []
    for label in range(1, params.n + 1):
        blocks = [hadamard_block(mult_matrix(field, field.power(label, j))) for j in range(params.k)]
        block_rows.append(np.hstack(blocks))
    matrix = np.vstack(block_rows)
    logger.debug("binary Vandermonde matrix %dx%d over GF(2^%d) modulus %s",
                 matrix.shape[0], matrix.shape[1], params.d, bin(field.irreducible))
    return BitMatrix.from_array(matrix)


def min_image_weight(matrix: BitMatrix, max_bits: int = MAX_EXHAUSTIVE_BITS) -> int:
    """
    Minimum Hamming weight of M u over all nonzero u, by exhaustive enumeration.
    """
    cols = matrix.cols
    if cols > max_bits:
        raise OversizeError(f"exhaustive search over 2^{cols} vectors exceeds 2^{max_bits}")
    dense = matrix.to_array().astype(np.int64)
    best = None
    chunk = 1 << 12
    for start in range(1, 1 << cols, chunk):
        u = np.arange(start, min(start + chunk, 1 << cols))
        vectors = ((u[:, None] >> np.arange(cols)) & 1).astype(np.int64)
        weights = ((vectors @ dense.T) % 2).sum(axis=1)
        low = int(weights.min())
        best = low if best is None else min(best, low)
    return best
