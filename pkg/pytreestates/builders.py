# -*- coding: utf-8 -*-
"""
Named state families as explicit state trees and amplitude vectors.

Trees built here pass validate() and act on qubits 1..n. Recursive builders split a
qubit range into a first half of floor(m/2) qubits and a second half.
"""
import cmath
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from pytreestates import settings
from pytreestates.errors import EmptyCosetError, ParameterError
from pytreestates.gf2 import Coset, coset_indices, row_space_indices, solve
from pytreestates.state_tree import (HADAMARD, SQRT_HALF, AmplitudeVector, Leaf, Plus, StateTree, Tensor,
                                     TreeNode, local_basis_change, product_node)

logger = logging.getLogger(__name__)


def _tensor(nodes: Sequence[TreeNode]) -> TreeNode:
    return nodes[0] if len(nodes) == 1 else Tensor(tuple(nodes))


def _plus(terms: Sequence[Tuple[complex, TreeNode]]) -> TreeNode:
    """Plus over the terms; a single term with unit coefficient is returned bare."""
    if len(terms) == 1 and terms[0][0] == 1:
        return terms[0][1]
    return Plus(tuple(terms))


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _bits_of(index: int, n: int) -> List[int]:
    return [(index >> (n - 1 - i)) & 1 for i in range(n)]


# ========================================================================
# ============================ cat and parity ============================
# ========================================================================
def build_cat(n: int) -> StateTree:
    """
    (|0...0> + |1...1>)/sqrt(2); for n >= 2 a plus of two classical products (size 2n).
    """
    if n < 1:
        raise ParameterError(f"cat state needs n >= 1, got {n}")
    if n == 1:
        return StateTree(Leaf.plus(1), 1)
    qubits = range(1, n + 1)
    root = Plus(((SQRT_HALF, product_node([0] * n, qubits)), (SQRT_HALF, product_node([1] * n, qubits))))
    return StateTree(root, n)


def _parity_node(start: int, count: int, parity: int, memo: Dict) -> TreeNode:
    key = (start, count, parity)
    if key not in memo:
        if count == 1:
            memo[key] = Leaf.bit(start, parity)
        else:
            half = count // 2
            memo[key] = Plus(tuple(
                (SQRT_HALF, Tensor((_parity_node(start, half, a, memo),
                                    _parity_node(start + half, count - half, a ^ parity, memo))))
                for a in (0, 1)))
    return memo[key]


def build_parity(n: int, j: int) -> StateTree:
    """
    Uniform superposition over n-bit strings of parity j, from
    P^j = (P^0 P^j + P^1 P^(1-j)) / sqrt(2) on the two halves; size n^2 for n a power of 2.
    """
    if j not in (0, 1):
        raise ParameterError(f"parity must be 0 or 1, got {j}")
    if n < 1:
        raise ParameterError(f"parity state needs n >= 1, got {n}")
    return StateTree(_parity_node(1, n, j, {}), n)


def build_parity_fourier(n: int, j: int) -> StateTree:
    """
    (|+>^n + (-1)^j |->^n) / sqrt(2): orthogonal but not manifestly orthogonal, size 2n.
    """
    if j not in (0, 1):
        raise ParameterError(f"parity must be 0 or 1, got {j}")
    if n < 1:
        raise ParameterError(f"parity state needs n >= 1, got {n}")
    plus = _tensor([Leaf.plus(q) for q in range(1, n + 1)])
    minus = _tensor([Leaf.minus(q) for q in range(1, n + 1)])
    return StateTree(Plus(((SQRT_HALF, plus), ((-1) ** j * SQRT_HALF, minus))), n)


def build_bell_pairs(n: int) -> StateTree:
    """2^(-n/4) (|00> + |11>)^(n/2) on the pairs (1,2), (3,4), ..."""
    if n < 2 or n % 2:
        raise ParameterError(f"Bell pairs need an even n >= 2, got {n}")
    pairs = [Plus(((SQRT_HALF, Tensor((Leaf.bit(q, 0), Leaf.bit(q + 1, 0)))),
                   (SQRT_HALF, Tensor((Leaf.bit(q, 1), Leaf.bit(q + 1, 1))))))
             for q in range(1, n + 1, 2)]
    return StateTree(_tensor(pairs), n)


def build_sigma3_example(n: int) -> StateTree:
    """
    (|0>^n + ((|01> + |10>)/sqrt(2))^(n/2)) / sqrt(2), a manifestly orthogonal tree of size 3n
    that does not factor at the root.
    """
    if n < 2 or n % 2:
        raise ParameterError(f"need an even n >= 2, got {n}")
    zeros = product_node([0] * n, range(1, n + 1))
    pairs = [Plus(((SQRT_HALF, Tensor((Leaf.bit(q, 0), Leaf.bit(q + 1, 1)))),
                   (SQRT_HALF, Tensor((Leaf.bit(q, 1), Leaf.bit(q + 1, 0))))))
             for q in range(1, n + 1, 2)]
    return StateTree(Plus(((SQRT_HALF, zeros), (SQRT_HALF, _tensor(pairs)))), n)


# ========================================================================
# =========================== 1-d cluster state ==========================
# ========================================================================
def _cluster_counts(count: int, memo: Dict) -> Dict[Tuple[int, int, int], int]:
    """
    c[(i, j, k)] = number of count-bit strings with first bit i, last bit k and
    x_1 x_2 + ... + x_(m-1) x_m = j (mod 2).
    """
    if count in memo:
        return memo[count]
    if count == 1:
        counts = {(0, 0, 0): 1, (1, 0, 1): 1}
    else:
        half = count // 2
        left, right = _cluster_counts(half, memo), _cluster_counts(count - half, memo)
        counts: Dict[Tuple[int, int, int], int] = {}
        for (i, j1, a), c1 in left.items():
            for (b, j2, k), c2 in right.items():
                key = (i, j1 ^ j2 ^ (a & b), k)
                counts[key] = counts.get(key, 0) + c1 * c2
    memo[count] = counts
    return counts


def _cluster_node(start: int, count: int, i: int, j: int, k: int, counts_memo: Dict, memo: Dict) -> TreeNode:
    """Normalized uniform superposition over the strings counted by c[(i, j, k)] on qubits start..start+count-1."""
    key = (start, count, i, j, k)
    if key in memo:
        return memo[key]
    total = _cluster_counts(count, counts_memo)[(i, j, k)]
    assert total > 0, "empty cluster branch requested"
    if count == 1:
        node: TreeNode = Leaf.bit(start, i)
    else:
        half = count // 2
        left, right = _cluster_counts(half, counts_memo), _cluster_counts(count - half, counts_memo)
        terms = []
        for a in (0, 1):
            for b in (0, 1):
                for j1 in (0, 1):
                    j2 = j ^ j1 ^ (a & b)
                    c1, c2 = left.get((i, j1, a), 0), right.get((b, j2, k), 0)
                    if c1 and c2:
                        child = Tensor((_cluster_node(start, half, i, j1, a, counts_memo, memo),
                                        _cluster_node(start + half, count - half, b, j2, k, counts_memo, memo)))
                        terms.append((math.sqrt(c1 * c2 / total), child))
        node = _plus(terms)
    memo[key] = node
    return node


def build_cluster1d(n: int) -> StateTree:
    """
    2^(-n/2) sum_x (-1)^(x_1 x_2 + ... + x_(n-1) x_n) |x>, written as
    |+>^n - 2 sum_(i,k) sqrt(c_i1k / 2^n) |P^i1k>, where |P^ijk> is the uniform superposition over
    strings with first bit i, phase parity j and last bit k, built recursively over the
    middle bits with coefficients from exact string counts.
    """
    if n < 2 or not _is_power_of_two(n):
        raise ParameterError(f"cluster state needs n a power of 2, n >= 2, got {n}")
    counts_memo: Dict = {}
    memo: Dict = {}
    counts = _cluster_counts(n, counts_memo)
    terms: List[Tuple[complex, TreeNode]] = [(1, _tensor([Leaf.plus(q) for q in range(1, n + 1)]))]
    for i in (0, 1):
        for k in (0, 1):
            c = counts.get((i, 1, k), 0)
            if c:
                terms.append((-2 * math.sqrt(c / 2 ** n), _cluster_node(1, n, i, 1, k, counts_memo, memo)))
    tree = StateTree(Plus(tuple(terms)), n)
    logger.debug("cluster state n=%d: size %d (size / n^4 = %.3f)", n, tree.size, tree.size / n ** 4)
    return tree


def cluster_phase_vector(n: int) -> AmplitudeVector:
    """Dense reference vector of the 1-d cluster state."""
    indices = np.arange(2 ** n)
    bits = (indices[:, None] >> np.arange(n - 1, -1, -1)) & 1
    phase = (bits[:, :-1] * bits[:, 1:]).sum(axis=1) % 2
    return AmplitudeVector(n, (1 - 2 * phase) / math.sqrt(2 ** n))


# ========================================================================
# ============================ Hamming weight ============================
# ========================================================================
def _hamming_node(start: int, count: int, weight: int, memo: Dict) -> TreeNode:
    key = (start, count, weight)
    if key in memo:
        return memo[key]
    if count == 1:
        node: TreeNode = Leaf.bit(start, weight)
    else:
        half = count // 2
        total = math.comb(count, weight)
        terms = []
        for j in range(max(0, weight - (count - half)), min(half, weight) + 1):
            numerator = math.comb(half, j) * math.comb(count - half, weight - j)
            child = Tensor((_hamming_node(start, half, j, memo),
                            _hamming_node(start + half, count - half, weight - j, memo)))
            terms.append((math.sqrt(numerator / total), child))
        node = terms[0][1] if len(terms) == 1 else Plus(tuple(terms))
    memo[key] = node
    return node


def build_hamming(n: int, k: int) -> StateTree:
    """
    Uniform superposition over n-bit strings of Hamming weight k, from
    |W_n,k> = sum_j sqrt(C(n1,j) C(n2,k-j) / C(n,k)) |W_n1,j> |W_n2,k-j>.
    """
    if n < 1 or not 0 <= k <= n:
        raise ParameterError(f"need n >= 1 and 0 <= k <= n, got n={n}, k={k}")
    tree = StateTree(_hamming_node(1, n, k, {}), n)
    logger.debug("Hamming state n=%d k=%d: size %d", n, k, tree.size)
    return tree


# ========================================================================
# ================================ cosets ================================
# ========================================================================
def build_coset_sigma1(c: Coset, cap: int = settings.COSET_CAP) -> StateTree:
    """
    Plus of |C| classical products with coefficients 1/sqrt(|C|), size n |C|.
    """
    members = coset_indices(c, cap)
    qubits = range(1, c.n + 1)
    coefficient = 1 / math.sqrt(len(members))
    terms = [(coefficient, product_node(_bits_of(int(x), c.n), qubits)) for x in members]
    return StateTree(_plus(terms), c.n)


def coset_vector(c: Coset, cap: int = settings.COSET_CAP) -> AmplitudeVector:
    return AmplitudeVector.uniform(c.n, coset_indices(c, cap))


def build_coset_fourier_otree(c: Coset, cap: int = settings.COSET_CAP) -> StateTree:
    """
    Orthogonal tree for |C>: the Hadamard transform of |C> is supported on the row space of A
    with amplitudes 2^(-rank/2) (-1)^(x0.y); its classical sum is mapped back by a Hadamard on
    every qubit. Size n 2^rank(A).
    """
    x0 = solve(c.a, c.b)
    if x0 is None:
        raise EmptyCosetError("Ax = b has no solution")
    dual = row_space_indices(c.a, cap)
    rank = int(dual.size).bit_length() - 1
    qubits = range(1, c.n + 1)
    amplitude = 2 ** (-rank / 2)
    terms = []
    for y in dual:
        bits = _bits_of(int(y), c.n)
        sign = (-1) ** int(np.dot(bits, x0) % 2)
        terms.append((sign * amplitude, product_node(bits, qubits)))
    fourier = StateTree(_plus(terms), c.n)
    return local_basis_change(fourier, [HADAMARD] * c.n)


# ========================================================================
# ============================= divisibility =============================
# ========================================================================
def _check_modulus(n: int, p: int) -> None:
    if p < 2 or 2 * p > 2 ** n:
        raise ParameterError(f"need p >= 2 and 2p <= 2^n, got n={n}, p={p}")


def build_residue_state(n: int, p: int, a: int) -> AmplitudeVector:
    """Uniform superposition over {x < 2^n : x = a (mod p)}."""
    _check_modulus(n, p)
    if not 0 <= a < p:
        raise ParameterError(f"residue must lie in 0..{p - 1}, got {a}")
    return AmplitudeVector.uniform(n, range(a, 2 ** n, p))


def build_divisibility_state(n: int, p: int) -> AmplitudeVector:
    """Uniform superposition over the multiples of p below 2^n."""
    return build_residue_state(n, p, 0)


def build_divisibility_tree(n: int, p: int) -> StateTree:
    """
    The indicator of p | x is (1/p) sum_h prod_j exp(2 pi i h 2^(n-j) x_j / p); term h becomes a
    product of leaves (|0> + e^(2 pi i h 2^(n-j)/p) |1>)/sqrt(2). Size n p.
    """
    _check_modulus(n, p)
    multiples = len(range(0, 2 ** n, p))
    coefficient = 2 ** (n / 2) / (p * math.sqrt(multiples))
    terms = []
    for h in range(p):
        leaves = []
        for q in range(1, n + 1):
            phase = cmath.exp(2j * math.pi * ((h * pow(2, n - q, p)) % p) / p)
            leaves.append(Leaf(q, SQRT_HALF, SQRT_HALF * phase))
        terms.append((coefficient, _tensor(leaves)))
    return StateTree(Plus(tuple(terms)), n)


# ========================================================================
# ================================= Knill ================================
# ========================================================================
def _two_term(sign: int, first: Sequence[int], second: Sequence[int], qubits: Sequence[int]) -> TreeNode:
    return Plus(((SQRT_HALF, product_node(first, qubits)), (sign * SQRT_HALF, product_node(second, qubits))))


def build_knill_tree() -> StateTree:
    """
    Four-term decomposition of the 5-qubit state with 16 amplitudes +-1/4, 40 leaves:
    (|01>+|10>)(|010>-|111>) + (|01>-|10>)(|001>-|100>)
    - (|00>+|11>)(|011>+|110>) + (|00>-|11>)(|000>+|101>), all over 4.
    """
    head, tail = (1, 2), (3, 4, 5)
    terms = [
        (0.5, Tensor((_two_term(1, (0, 1), (1, 0), head), _two_term(-1, (0, 1, 0), (1, 1, 1), tail)))),
        (0.5, Tensor((_two_term(-1, (0, 1), (1, 0), head), _two_term(-1, (0, 0, 1), (1, 0, 0), tail)))),
        (-0.5, Tensor((_two_term(1, (0, 0), (1, 1), head), _two_term(1, (0, 1, 1), (1, 1, 0), tail)))),
        (0.5, Tensor((_two_term(-1, (0, 0), (1, 1), head), _two_term(1, (0, 0, 0), (1, 0, 1), tail)))),
    ]
    return StateTree(Plus(tuple(terms)), 5)


# ========================================================================
# ========================== Schmidt decomposition =======================
# ========================================================================
def _schmidt_node(matrix_vector: np.ndarray, qubits: Sequence[int], tol: float) -> TreeNode:
    if len(qubits) == 1:
        return Leaf(qubits[0], matrix_vector[0], matrix_vector[1])
    half = len(qubits) // 2
    left, right = qubits[:half], qubits[half:]
    matrix = matrix_vector.reshape(2 ** half, 2 ** (len(qubits) - half))
    u, sigma, vh = np.linalg.svd(matrix, full_matrices=False)
    terms = []
    for i in np.flatnonzero(sigma > tol):
        child = Tensor((_schmidt_node(u[:, i], left, tol), _schmidt_node(vh[i, :], right, tol)))
        terms.append((float(sigma[i]), child))
    if len(terms) == 1 and abs(terms[0][0] - 1) <= tol:
        return terms[0][1]
    norm = math.sqrt(sum(s * s for s, _ in terms))
    return Plus(tuple((s / norm, child) for s, child in terms))


def build_schmidt_tree(v: AmplitudeVector, tol: float = settings.TOLERANCE) -> StateTree:
    """
    Tree from recursive Schmidt decompositions: split the qubits in halves, take the SVD across
    the cut, recurse on both sides of every retained Schmidt pair. Singular values <= tol are
    dropped and the rest renormalized.
    """
    if not v.is_normalized(tol):
        raise ParameterError(f"vector has norm {v.norm():.12g}, expected 1")
    tree = StateTree(_schmidt_node(v.amps, list(range(1, v.n + 1)), tol), v.n)
    logger.debug("Schmidt tree over %d qubits: size %d", v.n, tree.size)
    return tree


# ========================================================================
# ================================ registry ==============================
# ========================================================================
FAMILIES = ('cat', 'parity', 'parity-fourier', 'cluster1d', 'hamming', 'coset-sigma1',
            'coset-fourier', 'divisibility', 'knill', 'bell-pairs', 'sigma3')
