# -*- coding: utf-8 -*-
"""
Arithmetic formulas over the complex numbers with binary + and x gates,
their multilinear polynomials, and the formula rewrites used by the tree bridge.

Classes:

    MultilinearPolynomial
    Formula
    Const
    Var
    Add
    Mul

Variables are numbered from 1, matching qubit indices.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from pytreestates import settings
from pytreestates.errors import NotMultilinearError, OversizeError, ParameterError

logger = logging.getLogger(__name__)

ZERO_COEFFICIENT = 1e-12  # coefficients at or below this modulus are not stored
MAX_EXPAND_VARIABLES = 24

Point = Union[Mapping[int, complex], Sequence[complex]]


# ========================================================================
# ============================== polynomials =============================
# ========================================================================
@dataclass(frozen=True, eq=False)
class MultilinearPolynomial:
    """
    Sparse multilinear polynomial: monomial bitmask (variable i -> bit i-1) -> coefficient.
    """
    terms: Dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {m: complex(c) for m, c in self.terms.items() if abs(c) > ZERO_COEFFICIENT}
        object.__setattr__(self, 'terms', cleaned)

    @classmethod
    def constant(cls, value: complex) -> "MultilinearPolynomial":
        return cls({0: value})

    @classmethod
    def variable(cls, index: int) -> "MultilinearPolynomial":
        return cls({1 << (index - 1): 1})

    @property
    def variables(self) -> int:
        mask = 0
        for monomial in self.terms:
            mask |= monomial
        return mask

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "MultilinearPolynomial") -> "MultilinearPolynomial":
        terms = dict(self.terms)
        for monomial, c in other.terms.items():
            terms[monomial] = terms.get(monomial, 0) + c
        return MultilinearPolynomial(terms)

    def __mul__(self, other: "MultilinearPolynomial") -> "MultilinearPolynomial":
        terms: Dict[int, complex] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if m1 & m2:
                    raise NotMultilinearError(f"product raises variables {_mask_names(m1 & m2)} to degree 2")
                terms[m1 | m2] = terms.get(m1 | m2, 0) + c1 * c2
        return MultilinearPolynomial(terms)

    def scaled(self, factor: complex) -> "MultilinearPolynomial":
        return MultilinearPolynomial({m: c * factor for m, c in self.terms.items()})

    def evaluate(self, point: Point) -> complex:
        value = _point_function(point)
        total = 0j
        for monomial, c in self.terms.items():
            term = c
            index = 1
            mask = monomial
            while mask:
                if mask & 1:
                    term *= value(index)
                mask >>= 1
                index += 1
            total += term
        return total

    def almost_equal(self, other: "MultilinearPolynomial", tol: float = settings.TOLERANCE) -> bool:
        for monomial in set(self.terms) | set(other.terms):
            if abs(self.terms.get(monomial, 0) - other.terms.get(monomial, 0)) > tol:
                return False
        return True

    def __str__(self):
        if not self.terms:
            return '0'
        parts = []
        for monomial in sorted(self.terms):
            names = _mask_names(monomial)
            parts.append(f"({self.terms[monomial]:.6g})" + ''.join(f"*{name}" for name in names))
        return ' + '.join(parts)


def _mask_names(mask: int) -> List[str]:
    names = []
    index = 1
    while mask:
        if mask & 1:
            names.append(f"x{index}")
        mask >>= 1
        index += 1
    return names


def _point_function(point: Point):
    if isinstance(point, Mapping):
        return lambda i: point[i]
    return lambda i: point[i - 1]


# ========================================================================
# =============================== formulas ===============================
# ========================================================================
class Formula(ABC):
    """
    Vertex of an arithmetic formula. `variables` is S(v) as a bitmask.
    """

    @abstractmethod
    def children(self) -> Tuple["Formula", ...]:
        pass

    @cached_property
    def variables(self) -> int:
        mask = 0
        for child in self.children():
            mask |= child.variables
        return mask

    @cached_property
    def size(self) -> int:
        """Number of leaves (constants and variables)."""
        return sum(child.size for child in self.children())

    @cached_property
    def depth(self) -> int:
        children = self.children()
        return 1 + max(child.depth for child in children) if children else 0

    def __add__(self, other: "Formula") -> "Formula":
        return Add(self, other)

    def __mul__(self, other: "Formula") -> "Formula":
        return Mul(self, other)


@dataclass(frozen=True)
class Const(Formula):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, 'value', complex(self.value))

    def children(self) -> tuple:
        return ()

    @cached_property
    def variables(self) -> int:
        return 0

    @cached_property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Var(Formula):
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ParameterError(f"variable indices start at 1, got {self.index}")

    def children(self) -> tuple:
        return ()

    @cached_property
    def variables(self) -> int:
        return 1 << (self.index - 1)

    @cached_property
    def size(self) -> int:
        return 1


@dataclass(frozen=True)
class Add(Formula):
    left: Formula
    right: Formula

    def children(self) -> Tuple[Formula, Formula]:
        return self.left, self.right


@dataclass(frozen=True)
class Mul(Formula):
    left: Formula
    right: Formula

    def children(self) -> Tuple[Formula, Formula]:
        return self.left, self.right


def sum_of(terms: Sequence[Formula]) -> Formula:
    """Balanced binary sum."""
    terms = list(terms)
    assert terms, "empty sum"
    if len(terms) == 1:
        return terms[0]
    middle = len(terms) // 2
    return Add(sum_of(terms[:middle]), sum_of(terms[middle:]))


def product_of(factors: Sequence[Formula]) -> Formula:
    """Balanced binary product."""
    factors = list(factors)
    assert factors, "empty product"
    if len(factors) == 1:
        return factors[0]
    middle = len(factors) // 2
    return Mul(product_of(factors[:middle]), product_of(factors[middle:]))


def scaled(coefficient: complex, formula: Formula) -> Formula:
    """coefficient * formula, omitting a unit coefficient."""
    if coefficient == 1:
        return formula
    return Mul(Const(coefficient), formula)


def formula_size(f: Formula) -> int:
    return f.size


def formula_depth(f: Formula) -> int:
    return f.depth


def formula_eval(f: Formula, point: Point) -> complex:
    """
    Value of f at a point.

    :param point: mapping variable -> value, or sequence (x_1, x_2, ...)
    """
    value = _point_function(point)
    memo: Dict[int, complex] = {}

    def walk(node: Formula) -> complex:
        key = id(node)
        if key not in memo:
            if isinstance(node, Const):
                memo[key] = node.value
            elif isinstance(node, Var):
                memo[key] = complex(value(node.index))
            elif isinstance(node, Add):
                memo[key] = walk(node.left) + walk(node.right)
            else:
                memo[key] = walk(node.left) * walk(node.right)
        return memo[key]

    return walk(f)


def formula_table(f: Formula, n: int) -> np.ndarray:
    """
    Values of f on all of {0,1}^n, indexed by the global basis convention (x_1 most significant).
    """
    if f.variables >> n:
        raise ParameterError(f"formula uses variables beyond x{n}")
    indices = np.arange(2 ** n)
    memo: Dict[int, np.ndarray] = {}

    def walk(node: Formula) -> np.ndarray:
        key = id(node)
        if key not in memo:
            if isinstance(node, Const):
                memo[key] = np.full(2 ** n, node.value, dtype=np.complex128)
            elif isinstance(node, Var):
                memo[key] = ((indices >> (n - node.index)) & 1).astype(np.complex128)
            elif isinstance(node, Add):
                memo[key] = walk(node.left) + walk(node.right)
            else:
                memo[key] = walk(node.left) * walk(node.right)
        return memo[key]

    return walk(f)


def expand_polynomial(f: Formula, max_variables: int = MAX_EXPAND_VARIABLES) -> MultilinearPolynomial:
    """
    Expands f into its multilinear polynomial.

    :raises NotMultilinearError: if the polynomial at some vertex has a variable of degree 2
    """
    count = bin(f.variables).count('1')
    if count > max_variables:
        raise OversizeError(f"expansion over {count} variables exceeds {max_variables}")
    memo: Dict[int, MultilinearPolynomial] = {}

    def walk(node: Formula) -> MultilinearPolynomial:
        key = id(node)
        if key not in memo:
            if isinstance(node, Const):
                memo[key] = MultilinearPolynomial.constant(node.value)
            elif isinstance(node, Var):
                memo[key] = MultilinearPolynomial.variable(node.index)
            elif isinstance(node, Add):
                memo[key] = walk(node.left) + walk(node.right)
            else:
                memo[key] = walk(node.left) * walk(node.right)
        return memo[key]

    return walk(f)


def is_multilinear(f: Formula) -> bool:
    try:
        expand_polynomial(f)
    except NotMultilinearError:
        return False
    return True


def is_syntactic(f: Formula) -> bool:
    """True if the children of every x gate mention disjoint variable sets."""
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Mul) and node.left.variables & node.right.variables:
            return False
        stack.extend(node.children())
    return True


def substitute(f: Formula, index: int, value: complex) -> Formula:
    """Replaces every occurrence of variable x_index by a constant."""
    bit = 1 << (index - 1)
    if not f.variables & bit:
        return f
    if isinstance(f, Var):
        return Const(value)
    if isinstance(f, Add):
        return Add(substitute(f.left, index, value), substitute(f.right, index, value))
    return Mul(substitute(f.left, index, value), substitute(f.right, index, value))


# ========================================================================
# =============================== rewrites ===============================
# ========================================================================
def make_syntactic(f: Formula) -> Formula:
    """
    Syntactically multilinear formula of the same size and polynomial.

    At every x gate whose children share a variable x, the child whose polynomial does not
    depend on x gets x := 0 substituted, which leaves its polynomial unchanged.

    :raises NotMultilinearError: if f is not multilinear
    """
    expand_polynomial(f)

    def walk(node: Formula) -> Formula:
        if isinstance(node, (Const, Var)):
            return node
        left, right = walk(node.left), walk(node.right)
        if isinstance(node, Add):
            return node if (left is node.left and right is node.right) else Add(left, right)
        shared = left.variables & right.variables
        if shared:
            left_vars = expand_polynomial(left).variables
            index = 1
            while shared:
                if shared & 1:
                    if left_vars & (1 << (index - 1)):
                        right = substitute(right, index, 0)
                    else:
                        left = substitute(left, index, 0)
                shared >>= 1
                index += 1
            return Mul(left, right)
        return node if (left is node.left and right is node.right) else Mul(left, right)

    result = walk(f)
    assert is_syntactic(result), "syntactic rewrite left shared variables"
    return result


def _brent_split(f: Formula) -> Tuple[Optional[Formula], Optional[Formula], Formula]:
    """
    Picks a subformula I with |f|/3 <= |I| <= 2|f|/3 and returns (G, H, I) with f = G + H*I.
    G = None stands for 0 and H = None for 1.
    """
    limit = 2 * f.size / 3
    path = [f]
    node = f
    while node.size > limit:
        left, right = node.children()
        node = left if left.size >= right.size else right
        path.append(node)
    g: Optional[Formula] = None
    h: Optional[Formula] = None
    for parent, child in zip(reversed(path[:-1]), reversed(path[1:])):
        sibling = parent.right if parent.left is child else parent.left
        if isinstance(parent, Add):
            g = sibling if g is None else Add(g, sibling)
        else:
            g = None if g is None else Mul(g, sibling)
            h = sibling if h is None else Mul(h, sibling)
    return g, h, node


def balance(f: Formula, small: int = 3) -> Formula:
    """
    Brent balancing: depth O(log |f|), same polynomial, multilinearity preserved.
    The input is made syntactic first so that H and I never share variables.

    :param small: formulas of at most this size are returned unchanged
    :return: Formula with depth <= 4 log2(size) + 8
    """
    f = make_syntactic(f)

    def walk(node: Formula) -> Formula:
        if node.size <= small:
            return node
        g, h, sub = _brent_split(node)
        assert h is None or not (h.variables & sub.variables), "Brent factor shares variables with subformula"
        result = walk(sub)
        if h is not None:
            result = Mul(walk(h), result)
        if g is not None:
            result = Add(walk(g), result)
        return result

    result = walk(f)
    logger.debug("balanced formula of size %d depth %d into size %d depth %d",
                 f.size, f.depth, result.size, result.depth)
    return result


def depth_bound(size: int) -> float:
    """Depth guaranteed by balance for a formula of the given size."""
    return 4 * math.log2(max(size, 1)) + 8


# ========================================================================
# ========================== threshold formulas ==========================
# ========================================================================
def build_threshold_formula(k: int, h: int, first: int = 1) -> Formula:
    """
    Multilinear formula for [x_first + ... + x_(first+k-1) >= h] on Boolean inputs.

    Splits the variables into halves L, R and combines disjoint events:
    T_k^h = T_L^h + sum_{i<h} (T_L^i - T_L^(i+1)) T_R^(h-i),
    so every product joins formulas on disjoint halves.

    :param k: number of variables
    :param h: threshold, 0 <= h <= k
    """
    if k < 1 or not 0 <= h <= k:
        raise ParameterError(f"threshold needs k >= 1 and 0 <= h <= k, got k={k}, h={h}")
    memo: Dict[Tuple[int, int, int], Formula] = {}

    def threshold(start: int, count: int, level: int) -> Optional[Formula]:
        # None stands for the constant 0
        if level <= 0:
            return Const(1)
        if level > count:
            return None
        key = (start, count, level)
        if key in memo:
            return memo[key]
        if count == 1:
            result: Optional[Formula] = Var(start)
        else:
            half = count // 2
            terms = []
            left_top = threshold(start, half, level)
            if left_top is not None:
                terms.append(left_top)
            for i in range(level):
                right = threshold(start + half, count - half, level - i)
                exactly = _exactly(threshold(start, half, i), threshold(start, half, i + 1))
                if right is None or exactly is None:
                    continue
                terms.append(exactly if isinstance(right, Const) else Mul(exactly, right))
            result = sum_of(terms) if terms else None
        memo[key] = result
        return result

    def _exactly(at_least: Optional[Formula], above: Optional[Formula]) -> Optional[Formula]:
        if at_least is None:
            return None
        if above is None:
            return at_least
        return Add(at_least, Mul(Const(-1), above))

    result = threshold(first, k, h)
    result = Const(0) if result is None else result
    logger.debug("threshold formula T_%d^%d has size %d", k, h, result.size)
    return result


# ========================================================================
# ============================ random corpus =============================
# ========================================================================
def random_formula(n_vars: int, size: int, rng: np.random.Generator, zero_padding: float = 0.0) -> Formula:
    """
    Random syntactically multilinear formula with `size` leaves over x_1..x_n_vars
    (plus two leaves per zero padding).

    :param zero_padding: probability of wrapping a subformula as (g + 0*x) with x taken from a
                         sibling's variables, which keeps the polynomial multilinear but breaks
                         syntactic multilinearity
    """
    if n_vars < 1 or size < 1:
        raise ParameterError("random formulas need at least one variable and one leaf")

    def leaf(variables: List[int]) -> Formula:
        if variables and rng.random() < 0.75:
            return Var(int(rng.choice(variables)))
        return Const(complex(round(float(rng.normal()), 3), round(float(rng.normal()), 3)))

    def build(variables: List[int], budget: int) -> Formula:
        if budget <= 1:
            return leaf(variables)
        left_budget = int(rng.integers(1, budget))
        right_budget = budget - left_budget
        if len(variables) >= 2 and rng.random() < 0.5:
            shuffled = list(rng.permutation(variables))
            cut = int(rng.integers(1, len(shuffled)))
            left_vars, right_vars = sorted(shuffled[:cut]), sorted(shuffled[cut:])
            left, right = build(left_vars, left_budget), build(right_vars, right_budget)
            if zero_padding and right_vars and rng.random() < zero_padding:
                left = Add(left, Mul(Const(0), Var(int(rng.choice(right_vars)))))
            return Mul(left, right)
        return Add(build(variables, left_budget), build(variables, right_budget))

    return build(list(range(1, n_vars + 1)), size)
