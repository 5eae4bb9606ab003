# -*- coding: utf-8 -*-
"""
Exact manifestly orthogonal tree size of coset states.

For a coset {x : Ax = b} the size M(A) depends only on A and satisfies

    M(A) = min over nontrivial column partitions (I, J) of 2^(r(I) + r(J) - r(A)) (M(A_I) + M(A_J))

with r the GF(2) rank. mots_coset solves this by dynamic programming over column
masks and rebuilds a witness tree; mots_bruteforce is an independent exhaustive search
over all manifestly orthogonal trees for a small explicit set.

Classes:

    MotsResult
    MotsExperimentReport

Column j of A belongs to qubit j+1 and to bit j of a column mask.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from pytreestates import settings
from pytreestates.errors import OversizeError, ParameterError
from pytreestates.gf2 import BitMatrix, Coset, coset_indices, random_bitmatrix
from pytreestates.state_tree import SQRT_HALF, Leaf, Plus, StateTree, Tensor, TreeNode

logger = logging.getLogger(__name__)


def _check_convention(convention: str) -> None:
    if convention not in settings.CONVENTIONS:
        raise ParameterError(f"unknown leaf convention '{convention}', expected one of {settings.CONVENTIONS}")


def _free_qubit_cost(convention: str) -> int:
    """Leaves needed for (|0> + |1>)/sqrt(2) on one qubit."""
    return 2 if convention == 'classical' else 1


def subset_ranks(columns: List[int]) -> Tuple[np.ndarray, np.ndarray]:
    """
    GF(2) rank and size of every column subset.

    The number of subsets T of I whose columns xor to zero is 2^(|I| - r(I)); it is obtained
    for all I at once by a sum over subsets of the zero-xor indicator.

    :param columns: column j as an int (bit r = entry in row r)
    :return: (rank, popcount) arrays indexed by mask
    """
    n = len(columns)
    xors = np.zeros(1, dtype=np.int64)
    popcount = np.zeros(1, dtype=np.int64)
    for c in columns:
        xors = np.concatenate([xors, xors ^ c])
        popcount = np.concatenate([popcount, popcount + 1])
    counts = (xors == 0).astype(np.int64)
    for j in range(n):
        view = counts.reshape(-1, 2, 1 << j)
        view[:, 1, :] += view[:, 0, :]
    kernel = np.round(np.log2(counts)).astype(np.int64)
    return popcount - kernel, popcount


def _reduced_columns(a: BitMatrix) -> List[int]:
    """Columns of the reduced row echelon form; every column subset keeps its rank."""
    words, pivots = a.echelon
    reduced = BitMatrix(words[:len(pivots)], a.cols) if pivots else BitMatrix.zeros(0, a.cols)
    return reduced.column_ints()


def _submasks_with_low_bit(mask: int) -> np.ndarray:
    """Submasks I of mask with the lowest bit of mask in I and I != mask."""
    low = mask & -mask
    subs = np.array([low], dtype=np.int64)
    rest = mask ^ low
    while rest:
        bit = rest & -rest
        subs = np.concatenate([subs, subs | bit])
        rest ^= bit
    return subs[:-1]


# ========================================================================
# ============================== DP solver ===============================
# ========================================================================
@dataclass
class MotsResult:
    """
    value: M(A) for the full column set. table: mask -> (value, chosen I) for every
    column subset (I = 0 for single columns). witness: manifestly orthogonal tree for the
    coset state with exactly `value` leaves, or None when not requested.
    """
    value: int
    convention: str
    values: np.ndarray
    splits: np.ndarray
    ranks: np.ndarray
    witness: Optional[StateTree] = None

    @property
    def table(self) -> Dict[int, Tuple[int, int]]:
        return {mask: (int(self.values[mask]), int(self.splits[mask])) for mask in range(1, len(self.values))}

    def table_lines(self) -> List[str]:
        lines = ['mask\trank\tvalue\tsplit']
        for mask in range(1, len(self.values)):
            lines.append(f"{mask}\t{int(self.ranks[mask])}\t{int(self.values[mask])}\t{int(self.splits[mask])}")
        return lines


def mots_coset(a: BitMatrix, convention: str = settings.CONVENTION, b=None, witness: bool = True,
               max_columns: int = settings.MOTS_MAX_COLUMNS, cap: int = settings.COSET_CAP) -> MotsResult:
    """
    Exact manifestly orthogonal tree size M(A) of the coset state {x : Ax = b}.

    :param a: k x n bit matrix, n <= max_columns
    :param convention: 'classical' (only |0>, |1> leaves) or 'free' (any single-qubit leaf)
    :param b: right hand side for the witness, zero by default
    :param witness: rebuild a witness tree (needs |C| <= cap)
    :return: MotsResult
    """
    _check_convention(convention)
    n = a.cols
    if n > max_columns:
        raise OversizeError(f"{n} columns exceed the solver cap of {max_columns}")
    ranks, popcount = subset_ranks(_reduced_columns(a))
    full = (1 << n) - 1
    values = np.zeros(1 << n, dtype=np.int64)
    splits = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        values[1 << j] = _free_qubit_cost(convention) if ranks[1 << j] == 0 else 1
    for mask in range(1, full + 1):
        if popcount[mask] < 2:
            continue
        subs = _submasks_with_low_bit(mask)
        rest = mask ^ subs
        costs = (values[subs] + values[rest]) << (ranks[subs] + ranks[rest] - ranks[mask])
        best = costs.min()
        values[mask] = best
        splits[mask] = subs[costs == best].min()
    logger.debug("MOTS of %dx%d matrix (%s leaves): %d", a.rows, n, convention, values[full])
    result = MotsResult(int(values[full]), convention, values, splits, ranks)
    if witness:
        result.witness = _witness(a, b, result, cap)
    return result


def _span(vectors: Iterable[int]) -> List[int]:
    basis = []
    for v in vectors:
        for w in basis:
            v = min(v, v ^ w)
        if v:
            basis.append(v)
    span = [0]
    for w in basis:
        span += [s ^ w for s in span]
    return span


def _witness(a: BitMatrix, b, result: MotsResult, cap: int) -> StateTree:
    n = a.cols
    columns = a.column_ints()
    size_log2 = n - int(result.ranks[-1])
    if 2 ** size_log2 > cap:
        raise OversizeError(f"witness for a coset of 2^{size_log2} elements exceeds the cap {cap}")
    b = np.zeros(a.rows, dtype=np.uint8) if b is None else np.asarray(b, dtype=np.uint8).reshape(-1)
    target = sum(1 << r for r, bit in enumerate(b) if bit)
    coset = Coset.checked(a, b)
    assert coset.n == n
    spans: Dict[int, set] = {}
    memo: Dict[Tuple[int, int], TreeNode] = {}

    def span_of(mask: int) -> set:
        if mask not in spans:
            spans[mask] = set(_span(columns[j] for j in range(n) if mask >> j & 1))
        return spans[mask]

    def build(mask: int, syndrome: int) -> TreeNode:
        key = (mask, syndrome)
        if key in memo:
            return memo[key]
        if mask & (mask - 1) == 0:
            j = mask.bit_length() - 1
            column, qubit = columns[j], j + 1
            if column == 0:
                assert syndrome == 0, "unreachable syndrome on a zero column"
                if result.convention == 'free':
                    node: TreeNode = Leaf.plus(qubit)
                else:
                    node = Plus(((SQRT_HALF, Leaf.bit(qubit, 0)), (SQRT_HALF, Leaf.bit(qubit, 1))))
            else:
                assert syndrome in (0, column), "unreachable syndrome on a single column"
                node = Leaf.bit(qubit, 1 if syndrome else 0)
        else:
            left = int(result.splits[mask])
            right = mask ^ left
            right_span = span_of(right)
            parts = sorted(t for t in span_of(left) if t ^ syndrome in right_span)
            assert len(parts) == 2 ** (int(result.ranks[left] + result.ranks[right] - result.ranks[mask])), \
                "projection classes do not match the rank formula"
            terms = [Tensor((build(left, t), build(right, t ^ syndrome))) for t in parts]
            if len(terms) == 1:
                node = _flatten(terms[0])
            else:
                coefficient = 1 / math.sqrt(len(terms))
                node = Plus(tuple((coefficient, _flatten(term)) for term in terms))
        memo[key] = node
        return node

    tree = StateTree(build((1 << n) - 1, target), n)
    assert tree.size == result.value, "witness size differs from the computed value"
    return tree


def _flatten(node: Tensor) -> Tensor:
    parts = []
    for child in node.children:
        parts.extend(child.children if isinstance(child, Tensor) else (child,))
    return Tensor(tuple(parts))


# ========================================================================
# ============================== brute force =============================
# ========================================================================
def mots_bruteforce(members: Iterable[int], n: int, convention: str = settings.CONVENTION,
                    max_qubits: int = settings.BRUTEFORCE_MAX_QUBITS,
                    max_set: int = settings.BRUTEFORCE_MAX_SET) -> int:
    """
    Minimum size of a manifestly orthogonal tree for the uniform superposition over an explicit
    set of basis indices, by exhaustive recursion over product splits across qubit bipartitions
    and disjoint splits of the set. Sum splits are skipped once a tree of at most 2m leaves is
    known on m qubits, since every sum split needs at least 2m.

    :param members: basis indices (qubit 1 most significant)
    """
    _check_convention(convention)
    support = frozenset(int(x) for x in members)
    if n > max_qubits or len(support) > max_set:
        raise OversizeError(f"brute force is limited to {max_qubits} qubits and {max_set} strings")
    if not support or any(not 0 <= x < 2 ** n for x in support):
        raise ParameterError("set must be a nonempty collection of n-bit strings")
    memo: Dict[Tuple[int, FrozenSet[int]], int] = {}

    def best(qubits: int, strings: FrozenSet[int]) -> int:
        key = (qubits, strings)
        if key in memo:
            return memo[key]
        count = bin(qubits).count('1')
        if count == 1:
            value = 1 if len(strings) == 1 else _free_qubit_cost(convention)
            memo[key] = value
            return value
        value = None
        for left in _submasks_with_low_bit(qubits):
            left = int(left)
            right = qubits ^ left
            left_part = frozenset(x & left for x in strings)
            right_part = frozenset(x & right for x in strings)
            if len(left_part) * len(right_part) != len(strings):
                continue
            cost = best(left, left_part) + best(right, right_part)
            value = cost if value is None else min(value, cost)
        if value is None or value > 2 * count:
            ordered = sorted(strings)
            first, others = ordered[0], ordered[1:]
            for choice in range(1 << (len(others) - 1)) if others else ():
                # the last string always stays in the second part, so both parts are nonempty
                part = frozenset([first] + [s for i, s in enumerate(others) if choice >> i & 1])
                rest = strings - part
                first_cost = best(qubits, part)
                if value is not None and first_cost + count >= value:
                    continue
                cost = first_cost + best(qubits, rest)
                value = cost if value is None else min(value, cost)
        memo[key] = value
        return value

    return best((1 << n) - 1, support)


def mots_bruteforce_coset(coset: Coset, convention: str = settings.CONVENTION) -> int:
    return mots_bruteforce(coset_indices(coset), coset.n, convention)


# ========================================================================
# =========================== random experiment ==========================
# ========================================================================
@dataclass
class MotsExperimentReport:
    n: int
    k: int
    trials: int
    seed: int
    convention: str
    values: List[int] = field(default_factory=list)
    zero_column_trials: int = 0
    low_rank_trials: int = 0
    low_rank_checked: bool = False

    @property
    def histogram(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.values).items()))

    def format_lines(self) -> List[str]:
        values = np.array(self.values)
        lines = ['n\tk\ttrials\tseed\tconvention\tmin\tmedian\tmax\tzero_column_fraction\tlow_rank_fraction',
                 f"{self.n}\t{self.k}\t{self.trials}\t{self.seed}\t{self.convention}\t{values.min()}\t"
                 f"{float(np.median(values)):g}\t{values.max()}\t{self.zero_column_trials / self.trials:.6f}\t"
                 + (f"{self.low_rank_trials / self.trials:.6f}" if self.low_rank_checked else 'na'),
                 'value\tcount']
        lines += [f"{value}\t{count}" for value, count in self.histogram.items()]
        return lines


def mots_random_experiment(n: int, k: int, trials: int, seed: int = 0,
                           convention: str = settings.CONVENTION,
                           max_columns: int = settings.MOTS_MAX_COLUMNS) -> MotsExperimentReport:
    """
    M(A) for uniformly random k x n matrices, with the fraction of trials hitting the bad events
    of a zero column or a column subset of size >= 12k with rank <= 2k/3.
    """
    if n > max_columns:
        raise OversizeError(f"{n} columns exceed the solver cap of {max_columns}")
    if trials < 1 or k < 0:
        raise ParameterError("need trials >= 1 and k >= 0")
    report = MotsExperimentReport(n, k, trials, seed, convention, low_rank_checked=12 * k <= n and k > 0)
    for trial in range(trials):
        a = random_bitmatrix(k, n, seed, trial)
        result = mots_coset(a, convention, witness=False, max_columns=max_columns)
        report.values.append(result.value)
        if any(c == 0 for c in a.column_ints()):
            report.zero_column_trials += 1
        if report.low_rank_checked:
            popcount = np.array([bin(m).count('1') for m in range(len(result.ranks))])
            if np.any((popcount >= 12 * k) & (result.ranks <= 2 * k / 3)):
                report.low_rank_trials += 1
    logger.info("MOTS experiment n=%d k=%d: values %s", n, k, report.histogram)
    return report
