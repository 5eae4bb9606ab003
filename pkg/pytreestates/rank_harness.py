# -*- coding: utf-8 -*-
"""
Partitions and restrictions of input variables, partition matrices, exact and approximate
matrix rank, and the randomized experiments built on them.

Classes:

    Partition
    Restriction
    SubgroupReport
    VandermondeReport
    ErasureReport
    ChiReport
    SubsetSumReport

Variables are numbered 1..n like qubits; variable q is bit n - q of a table index.
Rows and columns of a partition matrix list the assignments to y_vars / z_vars in
lexicographic order, the first listed variable being the most significant.
"""
import logging
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from pytreestates import settings
from pytreestates.bridge import FunctionTable
from pytreestates.errors import ConvergenceError, DimensionMismatchError, OversizeError, ParameterError
from pytreestates.gf2 import (BitMatrix, Coset, coset_indices, invertibility_product, is_invertible, random_bitmatrix,
                              rank_gf2)
from pytreestates.gf2d import VandermondeParams, build_binary_vandermonde
from pytreestates.state_tree import AmplitudeVector
from pytreestates.streams import trial_rng

logger = logging.getLogger(__name__)

PRIME = 2 ** 61 - 1
DYADIC_MAX_BITS = 40  # larger denominators are treated as rounded irrationals
MAX_EXACT_DIMENSION = 4096
MAX_EPS_DIMENSION = 1024
JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 60
MAX_SUBGROUP_N = 24
MAX_ERASURE_L = 8
CHI_EXHAUSTIVE_MAX = 12
CHI_SAMPLED_MAX = 16
MAX_SUBSET_SUM_M = 24

Table = Union[FunctionTable, np.ndarray]


# ========================================================================
# ======================= partitions and restrictions ====================
# ========================================================================
@dataclass(frozen=True)
class Partition:
    """Balanced bipartition of the variables 1..n."""
    y_vars: Tuple[int, ...]
    z_vars: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'y_vars', tuple(self.y_vars))
        object.__setattr__(self, 'z_vars', tuple(self.z_vars))
        if len(self.y_vars) != len(self.z_vars):
            raise ParameterError(f"partition halves differ in size: {len(self.y_vars)} and {len(self.z_vars)}")
        if sorted(self.y_vars + self.z_vars) != list(range(1, self.n + 1)):
            raise ParameterError(f"{self.y_vars} and {self.z_vars} do not partition 1..{self.n}")

    @property
    def n(self) -> int:
        return len(self.y_vars) + len(self.z_vars)


@dataclass(frozen=True)
class Restriction:
    """2l renamed variables split into y and z; every other variable fixed to a bit."""
    y_vars: Tuple[int, ...]
    z_vars: Tuple[int, ...]
    fixed: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'y_vars', tuple(self.y_vars))
        object.__setattr__(self, 'z_vars', tuple(self.z_vars))
        if len(self.y_vars) != len(self.z_vars):
            raise ParameterError(f"restriction halves differ in size: {len(self.y_vars)} and {len(self.z_vars)}")
        if sorted(self.y_vars + self.z_vars + tuple(self.fixed)) != list(range(1, self.n + 1)):
            raise ParameterError("restricted, renamed and fixed variables must partition 1..n")
        if any(bit not in (0, 1) for bit in self.fixed.values()):
            raise ParameterError("fixed variables take the values 0 or 1")

    @property
    def l(self) -> int:
        return len(self.y_vars)

    @property
    def n(self) -> int:
        return 2 * len(self.y_vars) + len(self.fixed)

    def as_partition(self) -> Partition:
        if self.fixed:
            raise ParameterError("a restriction with fixed variables is not a partition")
        return Partition(self.y_vars, self.z_vars)


def _rng(seed: int, trial: int, rng: Optional[np.random.Generator]) -> np.random.Generator:
    return trial_rng(seed, trial) if rng is None else rng


def random_partition(n: int, seed: int = 0, trial: int = 0,
                     rng: Optional[np.random.Generator] = None) -> Partition:
    """Uniform balanced bipartition of 1..n."""
    if n < 2 or n % 2:
        raise ParameterError(f"partitions need an even n >= 2, got {n}")
    order = _rng(seed, trial, rng).permutation(n) + 1
    return Partition(tuple(sorted(int(v) for v in order[:n // 2])), tuple(sorted(int(v) for v in order[n // 2:])))


def random_restriction(n: int, l: int, seed: int = 0, trial: int = 0,
                       rng: Optional[np.random.Generator] = None) -> Restriction:
    """Uniform choice of y and z among 1..n, each of size l, the other n - 2l variables uniform bits."""
    if l < 1 or 2 * l > n:
        raise ParameterError(f"restrictions need 1 <= l <= n/2, got l={l}, n={n}")
    rng = _rng(seed, trial, rng)
    order = rng.permutation(n) + 1
    bits = rng.integers(0, 2, size=n - 2 * l)
    fixed = {int(v): int(b) for v, b in zip(order[2 * l:], bits)}
    return Restriction(tuple(sorted(int(v) for v in order[:l])), tuple(sorted(int(v) for v in order[l:2 * l])), fixed)


# ========================================================================
# =========================== partition matrices =========================
# ========================================================================
def _table_values(f: Table) -> Tuple[int, np.ndarray]:
    values = f.values if isinstance(f, FunctionTable) else np.asarray(f).reshape(-1)
    n = values.shape[0].bit_length() - 1
    if values.shape[0] != 1 << n:
        raise DimensionMismatchError(f"function table of length {values.shape[0]} is not a power of two")
    return n, values


def _offsets(variables: Sequence[int], n: int) -> np.ndarray:
    """Index contribution of every assignment to variables, first variable most significant."""
    count = len(variables)
    assignments = np.arange(1 << count)
    offsets = np.zeros(1 << count, dtype=np.int64)
    for i, var in enumerate(variables):
        offsets |= ((assignments >> (count - 1 - i)) & 1) << (n - var)
    return offsets


def restriction_matrix(f: Table, r: Restriction) -> np.ndarray:
    """2^l x 2^l matrix with entry (y, z) = f at the input assembled from y, z and the fixed bits."""
    n, values = _table_values(f)
    if n != r.n:
        raise DimensionMismatchError(f"table over {n} variables, restriction over {r.n}")
    base = sum(bit << (n - var) for var, bit in r.fixed.items())
    indices = base | _offsets(r.y_vars, n)[:, None] | _offsets(r.z_vars, n)[None, :]
    return values[indices]


def partition_matrix(f: Table, p: Partition) -> np.ndarray:
    """2^(n/2) x 2^(n/2) matrix M_f|P with entry (y, z) = f(y, z)."""
    return restriction_matrix(f, Restriction(p.y_vars, p.z_vars))


def is_permutation_matrix(m: np.ndarray) -> bool:
    """0/1 square matrix with exactly one 1 per row and per column."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    nonzero = m != 0
    return bool(np.all(m[nonzero] == 1) and np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1))


# ========================================================================
# ================================ exact rank ============================
# ========================================================================
def _integer_rows(array: np.ndarray) -> np.ndarray:
    """Rows of ints or Fractions scaled to Python integers (row scaling keeps the rank)."""
    rows = []
    for row in array:
        entries = [Fraction(value) for value in row]
        scale = 1
        for value in entries:
            scale = math.lcm(scale, value.denominator)
        rows.append([int(value * scale) for value in entries])
    return np.array(rows, dtype=object).reshape(array.shape)


def _bareiss_rank(a: np.ndarray) -> int:
    """Fraction-free elimination; every division below is exact."""
    a = a.copy()
    rows, cols = a.shape
    rank, previous = 0, 1
    for col in range(cols):
        if rank == rows:
            break
        hits = np.flatnonzero(a[rank:, col] != 0)
        if hits.size == 0:
            continue
        pivot_row = rank + int(hits[0])
        if pivot_row != rank:
            a[[rank, pivot_row]] = a[[pivot_row, rank]]
        pivot = a[rank, col]
        below = a[rank + 1:, col:]
        a[rank + 1:, col:] = (pivot * below - below[:, :1] * a[rank:rank + 1, col:]) // previous
        previous = pivot
        rank += 1
    return rank


def _modular_rank(a: np.ndarray, prime: int = PRIME) -> int:
    a = a % prime
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        hits = np.flatnonzero(a[rank:, col] != 0)
        if hits.size == 0:
            continue
        pivot_row = rank + int(hits[0])
        if pivot_row != rank:
            a[[rank, pivot_row]] = a[[pivot_row, rank]]
        a[rank] = a[rank] * pow(int(a[rank, col]), -1, prime) % prime
        below = a[rank + 1:]
        a[rank + 1:] = (below - below[:, col:col + 1] * a[rank:rank + 1]) % prime
        rank += 1
    return rank


def _dyadic_integers(real: np.ndarray) -> Optional[np.ndarray]:
    """Float matrix scaled to integers when every entry is a dyadic rational with a small denominator."""
    ratios = [float(value).as_integer_ratio() for value in real.reshape(-1)]
    denominator = max(den for _, den in ratios)
    if denominator > 1 << DYADIC_MAX_BITS:
        return None
    return np.array([num * (denominator // den) for num, den in ratios], dtype=object).reshape(real.shape)


def rank_exact_checked(matrix) -> Tuple[int, bool]:
    """
    Rank over the complex numbers together with a flag telling whether it was computed exactly.

    Integer and Fraction entries use fraction-free elimination over the rationals; dyadic floats
    are scaled to integers and eliminated modulo the prime 2^61 - 1; other floats fall back to
    counting singular values above 1e-9 and warn.
    """
    array = np.asarray(matrix)
    if array.ndim != 2:
        raise DimensionMismatchError(f"rank needs a two dimensional matrix, got shape {array.shape}")
    if max(array.shape) > MAX_EXACT_DIMENSION:
        raise OversizeError(f"matrix of shape {array.shape} exceeds {MAX_EXACT_DIMENSION}")
    if array.size == 0:
        return 0, True
    if array.dtype == object:
        return _bareiss_rank(_integer_rows(array)), True
    if np.issubdtype(array.dtype, np.integer) or array.dtype == bool:
        return _bareiss_rank(array.astype(np.int64).astype(object)), True
    if not np.iscomplexobj(array) or not np.any(array.imag):
        scaled = _dyadic_integers(np.real(array))
        if scaled is not None:
            return _modular_rank(scaled), True
    warnings.warn("matrix entries are not exact; rank falls back to singular values above 1e-9", RuntimeWarning)
    singular = np.linalg.svd(array.astype(np.complex128), compute_uv=False)
    return int(np.sum(singular > settings.TOLERANCE)), False


def rank_exact(matrix) -> int:
    """
    :param matrix: ints, Fractions or floats, at most 4096 x 4096
    :return: rank over the complex numbers
    """
    return rank_exact_checked(matrix)[0]


# ========================================================================
# ============================ approximate rank ==========================
# ========================================================================
def _round_robin(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """n - 1 rounds of n/2 disjoint pairs covering every pair once (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        rounds.append((np.array([min(pair) for pair in pairs]), np.array([max(pair) for pair in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def symmetric_eigenvalues(a: np.ndarray, tol: float = JACOBI_TOLERANCE,
                          max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """
    Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations, n/2 disjoint rotations
    applied at once. Sorted in decreasing order.

    :raises ConvergenceError: if the off-diagonal mass is still above tol after max_sweeps
    """
    a = np.array(a, dtype=np.float64)
    size = a.shape[0]
    if a.ndim != 2 or a.shape[1] != size:
        raise DimensionMismatchError(f"eigenvalues need a square matrix, got shape {a.shape}")
    if size % 2:
        a = np.pad(a, ((0, 1), (0, 1)))
    scale = max(1.0, float(np.linalg.norm(a)))
    rounds = _round_robin(a.shape[0]) if a.shape[0] > 1 else []
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(max(0.0, float(np.sum(a ** 2) - np.sum(np.diag(a) ** 2))))
        if off <= tol * scale:
            logger.debug("Jacobi converged after %d sweeps on a %dx%d matrix", sweep, size, size)
            return np.sort(np.diag(a)[:size])[::-1]
        if sweep == max_sweeps:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0
            theta = (a[q, q] - a[p, p]) / (2 * np.where(active, apq, 1.0))
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta ** 2 + 1))
            t = np.where(active, t, 0.0)
            c = 1 / np.sqrt(t ** 2 + 1)
            s = t * c
            rows_p, rows_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            cols_p, cols_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cols_p * c - cols_q * s
            a[:, q] = cols_p * s + cols_q * c
    raise ConvergenceError(f"Jacobi iteration did not converge within {max_sweeps} sweeps")


def squared_singular_values(matrix, tol: float = JACOBI_TOLERANCE,
                            max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """sigma_i(M)^2 in decreasing order, from the eigenvalues of M M^dagger."""
    m = np.asarray(matrix)
    gram = m @ m.conj().T
    if np.iscomplexobj(gram) and np.any(gram.imag):
        # real form [[Re, -Im], [Im, Re]] repeats every eigenvalue twice
        embedded = np.block([[gram.real, -gram.imag], [gram.imag, gram.real]])
        values = symmetric_eigenvalues(embedded, tol, max_sweeps)[::2]
    else:
        values = symmetric_eigenvalues(np.real(gram), tol, max_sweeps)
    return np.clip(values, 0.0, None)


def rank_eps_lower_bound(matrix, eps: float, tol: float = JACOBI_TOLERANCE,
                         max_sweeps: int = JACOBI_MAX_SWEEPS) -> int:
    """
    Smallest k with sum_{i>k} sigma_i(M)^2 <= eps. Every L with ||L - M||_2^2 <= eps has rank at
    least k, so this is a lower bound on rank_eps(M), not its exact value.

    :param matrix: at most 1024 x 1024
    :param eps: squared Frobenius radius, >= 0
    """
    m = np.asarray(matrix)
    if eps < 0:
        raise ParameterError(f"eps must be non-negative, got {eps}")
    if m.ndim != 2 or max(m.shape) > MAX_EPS_DIMENSION:
        raise OversizeError(f"approximate rank is limited to {MAX_EPS_DIMENSION}x{MAX_EPS_DIMENSION} matrices")
    values = squared_singular_values(m, tol, max_sweeps)
    tails = np.concatenate([np.cumsum(values[::-1])[::-1], [0.0]])
    slack = tol * max(1.0, float(tails[0]))
    return int(np.flatnonzero(tails <= eps + slack)[0])


# ========================================================================
# ========================== subgroup experiment =========================
# ========================================================================
def rank_threshold(l: int) -> float:
    """2^(l - l^(1/8) / 2), evaluated as a real number."""
    return 2.0 ** (l - l ** 0.125 / 2)


@dataclass
class SubgroupReport:
    n: int
    k: int
    trials: int
    seed: int
    both_invertible: int = 0
    full_rank: int = 0
    above_threshold: int = 0
    permutations_verified: int = 0
    ranks: List[int] = field(default_factory=list)

    @property
    def expected_both_invertible(self) -> Optional[float]:
        """(prod_{i=1..n/2} (1 - 2^-i))^2 for square halves."""
        return invertibility_product(self.n // 2) ** 2 if self.k == self.n // 2 else None

    def format_lines(self) -> List[str]:
        expected = self.expected_both_invertible
        return ['n\tk\ttrials\tseed\tboth_invertible_fraction\texpected\tfull_rank_fraction\t'
                'above_threshold_fraction\tpermutations_verified',
                f"{self.n}\t{self.k}\t{self.trials}\t{self.seed}\t{self.both_invertible / self.trials:.6f}\t"
                + ('na' if expected is None else f"{expected:.6f}")
                + f"\t{self.full_rank / self.trials:.6f}\t{self.above_threshold / self.trials:.6f}\t"
                  f"{self.permutations_verified}"]


def subgroup_matrix(a: BitMatrix, p: Partition) -> np.ndarray:
    """
    M_S|P for S = {x : Ax = 0}: entry (y, z) is 1 iff A_y y = A_z z.
    """
    half = len(p.y_vars)
    sides = []
    for variables in (p.y_vars, p.z_vars):
        columns = a.columns([v - 1 for v in variables]).column_ints()
        assignments = np.arange(1 << half)
        images = np.zeros(1 << half, dtype=np.int64)
        for i, column in enumerate(columns):
            images = np.where((assignments >> (half - 1 - i)) & 1, images ^ column, images)
        sides.append(images)
    return (sides[0][:, None] == sides[1][None, :]).astype(np.int64)


def subgroup_rank(a: BitMatrix, p: Partition) -> int:
    """
    rank M_S|P = |im A_y intersected with im A_z| = 2^(rank A_y + rank A_z - rank A):
    rows and columns group by the common image value into disjoint all-ones blocks.
    """
    a_y = a.columns([v - 1 for v in p.y_vars])
    a_z = a.columns([v - 1 for v in p.z_vars])
    return 2 ** (rank_gf2(a_y) + rank_gf2(a_z) - rank_gf2(a))


def subgroup_rank_experiment(n: int, trials: int, seed: int = 0, k: Optional[int] = None,
                             exact_check: bool = False) -> SubgroupReport:
    """
    Random subgroups S = ker A (A uniform k x n, k = n/2 by default) against random balanced
    partitions. Counts trials where A_y and A_z are both invertible, checks that M_S|P is then a
    permutation matrix, and counts full-rank and above-threshold matrices.

    :param exact_check: also compare the closed-form rank with rank_exact
    """
    if n < 2 or n % 2 or n > MAX_SUBGROUP_N:
        raise OversizeError(f"subgroup experiments need an even n <= {MAX_SUBGROUP_N}, got {n}")
    k = n // 2 if k is None else k
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}")
    report = SubgroupReport(n, k, trials, seed)
    half = n // 2
    threshold = rank_threshold(half)
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        a = random_bitmatrix(k, n, rng=rng)
        partition = random_partition(n, rng=rng)
        rank = subgroup_rank(a, partition)
        report.ranks.append(rank)
        if k == half and is_invertible(a.columns([v - 1 for v in partition.y_vars])) \
                and is_invertible(a.columns([v - 1 for v in partition.z_vars])):
            report.both_invertible += 1
            matrix = subgroup_matrix(a, partition)
            assert is_permutation_matrix(matrix), "both halves invertible but M is not a permutation matrix"
            report.permutations_verified += 1
        if exact_check:
            assert rank_exact(subgroup_matrix(a, partition)) == rank, "closed-form rank differs from elimination"
        report.full_rank += rank == 1 << half
        report.above_threshold += rank >= threshold
    logger.info("subgroup experiment n=%d: %d of %d trials with both halves invertible",
                n, report.both_invertible, trials)
    return report


# ========================================================================
# ======================== Vandermonde experiment ========================
# ========================================================================
def full_rank_bound(n: int, k: int, d: int, c: int) -> float:
    """1 - (1 + k/n)^(kd) (1/2 + k/(2n))^c, the full-rank probability bound for kd + c random rows."""
    return 1 - (1 + k / n) ** (k * d) * (0.5 + k / (2 * n)) ** c


@dataclass
class VandermondeReport:
    params: VandermondeParams
    trials: int
    seed: int
    full_rank: int = 0
    pair_full_rank: int = 0
    pair_trials: int = 0

    @property
    def bound(self) -> float:
        p = self.params
        return full_rank_bound(p.n, p.k, p.d, p.c)

    @property
    def fraction(self) -> float:
        return self.full_rank / self.trials

    @property
    def pair_fraction(self) -> Optional[float]:
        return self.pair_full_rank / self.pair_trials if self.pair_trials else None

    def format_lines(self) -> List[str]:
        p = self.params
        pair = self.pair_fraction
        return ['n\tk\td\tc\ttrials\tseed\tfull_rank_fraction\tbound\tpair_full_rank_fraction',
                f"{p.n}\t{p.k}\t{p.d}\t{p.c}\t{self.trials}\t{self.seed}\t{self.fraction:.6f}\t"
                f"{self.bound:.6f}\t" + ('na' if pair is None else f"{pair:.6f}")]


def vandermonde_rank_experiment(params: VandermondeParams, trials: int, seed: int = 0) -> VandermondeReport:
    """
    Full-rank fraction over GF(2) of uniformly random (kd + c)-row submatrices of V_bin, and the
    fraction of trials where two disjoint such submatrices are both full rank.
    """
    matrix = build_binary_vandermonde(params)
    rows = params.cols + params.c
    if rows > matrix.rows:
        raise ParameterError(f"cannot select {rows} of {matrix.rows} rows")
    report = VandermondeReport(params, trials, seed)
    pairs = 2 * rows <= matrix.rows
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        chosen = rng.choice(matrix.rows, size=2 * rows if pairs else rows, replace=False)
        first = rank_gf2(matrix.select_rows(chosen[:rows])) == params.cols
        report.full_rank += first
        if pairs:
            report.pair_trials += 1
            report.pair_full_rank += first and rank_gf2(matrix.select_rows(chosen[rows:])) == params.cols
    logger.info("Vandermonde experiment %s: full rank in %d of %d trials", params, report.full_rank, trials)
    return report


# ========================================================================
# =========================== erasure experiment =========================
# ========================================================================
@dataclass
class ErasureReport:
    n: int
    l: int
    trials: int
    seed: int
    threshold: float
    ranks: List[int] = field(default_factory=list)
    ambiguous_rows: List[int] = field(default_factory=list)
    nonzero_rows: List[int] = field(default_factory=list)

    @property
    def above_threshold_fraction(self) -> float:
        return sum(rank >= self.threshold for rank in self.ranks) / self.trials

    def format_lines(self) -> List[str]:
        lines = ['n\tl\ttrials\tseed\tthreshold\tabove_threshold_fraction\tmean_ambiguous_rows\tmean_nonzero_rows',
                 f"{self.n}\t{self.l}\t{self.trials}\t{self.seed}\t{self.threshold:.6f}\t"
                 f"{self.above_threshold_fraction:.6f}\t{np.mean(self.ambiguous_rows):.6f}\t"
                 f"{np.mean(self.nonzero_rows):.6f}",
                 'rank\tcount']
        lines += [f"{rank}\t{count}" for rank, count in sorted(Counter(self.ranks).items())]
        return lines


def coset_table(c: Coset, cap: int = settings.COSET_CAP) -> np.ndarray:
    """0/1 indicator of C over {0,1}^n."""
    if 2 ** c.n > cap:
        raise OversizeError(f"indicator table of 2^{c.n} entries exceeds the cap {cap}")
    table = np.zeros(1 << c.n, dtype=np.int64)
    table[coset_indices(c, cap)] = 1
    return table


def erasure_recoverability_check(c: Coset, l: int, trials: int, seed: int = 0,
                                 cap: int = settings.COSET_CAP) -> ErasureReport:
    """
    For random restrictions R_l of the coset indicator, counts rows of M_f|R with two or more
    nonzero entries (the z bits are not recoverable from the rest), nonzero rows, and the exact rank.
    """
    if l > MAX_ERASURE_L:
        raise OversizeError(f"restriction matrices are limited to l <= {MAX_ERASURE_L}")
    table = coset_table(c, cap)
    report = ErasureReport(c.n, l, trials, seed, rank_threshold(l))
    for trial in range(trials):
        matrix = restriction_matrix(table, random_restriction(c.n, l, seed, trial))
        per_row = np.count_nonzero(matrix, axis=1)
        report.ambiguous_rows.append(int(np.sum(per_row >= 2)))
        report.nonzero_rows.append(int(np.sum(per_row > 0)))
        report.ranks.append(rank_exact(matrix))
    logger.info("erasure check n=%d l=%d: ranks %s", c.n, l, dict(Counter(report.ranks)))
    return report


# ========================================================================
# ============================== Schmidt rank ============================
# ========================================================================
def schmidt_rank(v: AmplitudeVector, qubits: Sequence[int], tol: float = settings.TOLERANCE) -> int:
    """Rank of the amplitudes reshaped to (qubits) x (the rest)."""
    axes = [q - 1 for q in qubits]
    rest = [axis for axis in range(v.n) if axis not in axes]
    matrix = np.transpose(v.as_tensor(), axes + rest).reshape(1 << len(axes), -1)
    return int(np.sum(np.linalg.svd(matrix, compute_uv=False) > tol))


@dataclass
class ChiReport:
    n: int
    mode: str
    chi: int
    bipartitions: int
    best: Tuple[int, ...]

    def format_lines(self) -> List[str]:
        return ['n\tmode\tbipartitions\tchi\targmax',
                f"{self.n}\t{self.mode}\t{self.bipartitions}\t{self.chi}\t{','.join(map(str, self.best))}"]


def chi_report(v: AmplitudeVector, mode: str = 'exhaustive', samples: int = 200, seed: int = 0,
               tol: float = settings.TOLERANCE) -> ChiReport:
    """
    Maximum Schmidt rank over bipartitions of the qubits: every bipartition for mode
    'exhaustive' (n <= 12), random ones for 'sampled' (n <= 16).
    """
    if mode == 'exhaustive':
        if v.n > CHI_EXHAUSTIVE_MAX:
            raise OversizeError(f"exhaustive bipartitions are limited to {CHI_EXHAUSTIVE_MAX} qubits")
        # qubit 1 stays on the first side; the complement gives the same rank
        sides = [(1,) + rest for size in range(v.n - 1) for rest in combinations(range(2, v.n + 1), size)]
    elif mode == 'sampled':
        if v.n > CHI_SAMPLED_MAX:
            raise OversizeError(f"sampled bipartitions are limited to {CHI_SAMPLED_MAX} qubits")
        rng = trial_rng(seed)
        sides = []
        for _ in range(samples):
            size = int(rng.integers(1, max(2, v.n)))
            sides.append(tuple(sorted(int(q) + 1 for q in rng.choice(v.n, size=min(size, v.n - 1), replace=False))))
    else:
        raise ParameterError(f"unknown mode '{mode}', expected 'exhaustive' or 'sampled'")
    if v.n == 1 or not sides:
        return ChiReport(v.n, mode, 1, 0, ())
    ranks = [schmidt_rank(v, side, tol) for side in sides]
    best = int(np.argmax(ranks))
    return ChiReport(v.n, mode, ranks[best], len(sides), sides[best])


def chi_max(v: AmplitudeVector, mode: str = 'exhaustive', samples: int = 200, seed: int = 0,
            tol: float = settings.TOLERANCE) -> int:
    return chi_report(v, mode, samples, seed, tol).chi


# ========================================================================
# =========================== subset sums mod p ==========================
# ========================================================================
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % divisor for divisor in range(2, math.isqrt(p) + 1))


def subset_sum_residues(elements: Sequence[int], p: int) -> np.ndarray:
    """Boolean mask over Z_p of the residues of all 2^m subset sums, built one element at a time."""
    reached = np.zeros(p, dtype=bool)
    reached[0] = True
    for element in elements:
        reached |= np.roll(reached, int(element) % p)
    return reached


def subset_sum_residues_naive(elements: Sequence[int], p: int) -> np.ndarray:
    reached = np.zeros(p, dtype=bool)
    for mask in range(1 << len(elements)):
        reached[sum(e for i, e in enumerate(elements) if mask >> i & 1) % p] = True
    return reached


@dataclass
class SubsetSumReport:
    n: int
    m: int
    p: int
    gamma: float
    trials: int
    seed: int
    coverage: List[int] = field(default_factory=list)

    @property
    def target(self) -> float:
        return (1 + self.gamma) * self.p / 2

    @property
    def hit_fraction(self) -> float:
        return sum(count >= self.target for count in self.coverage) / self.trials

    def format_lines(self) -> List[str]:
        lines = ['n\tm\tp\tgamma\ttrials\tseed\ttarget\thit_fraction\tmin\tmedian\tmax',
                 f"{self.n}\t{self.m}\t{self.p}\t{self.gamma:g}\t{self.trials}\t{self.seed}\t{self.target:g}\t"
                 f"{self.hit_fraction:.6f}\t{min(self.coverage)}\t{float(np.median(self.coverage)):g}\t"
                 f"{max(self.coverage)}",
                 'coverage\tcount']
        lines += [f"{value}\t{count}" for value, count in sorted(Counter(self.coverage).items())]
        return lines


def subset_sum_coverage(n: int, m: int, p: int, gamma: float, trials: int, seed: int = 0) -> SubsetSumReport:
    """
    For random m-element sets A of powers 2^0..2^(n-1), the number of residues mod p reached by
    subset sums of A, and the fraction of trials reaching at least (1 + gamma) p / 2.
    """
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if m > MAX_SUBSET_SUM_M:
        raise OversizeError(f"subset sums are limited to m <= {MAX_SUBSET_SUM_M}")
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}, n={n}")
    report = SubsetSumReport(n, m, p, gamma, trials, seed)
    for trial in range(trials):
        exponents = trial_rng(seed, trial).choice(n, size=m, replace=False)
        elements = [pow(2, int(e), p) for e in sorted(exponents)]
        report.coverage.append(int(subset_sum_residues(elements, p).sum()))
    logger.info("subset sums n=%d m=%d p=%d: coverage %s", n, m, p, dict(Counter(report.coverage)))
    return report
