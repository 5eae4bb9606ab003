# -*- coding: utf-8 -*-
"""
Conversions between state trees and multilinear formulas, and between amplitude
vectors and function tables f(x) = <x|psi>.

Classes:

    FunctionTable
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from pytreestates import settings
from pytreestates.errors import DimensionMismatchError, ParameterError
from pytreestates.formula import (Add, Const, Formula, Mul, Var, formula_table, make_syntactic, product_of, scaled,
                                  sum_of)
from pytreestates.state_tree import (AmplitudeVector, Leaf, Plus, StateTree, Tensor, TreeNode, bitstring,
                                     eps_to_delta, evaluate, full_mask, mask_qubits, normalize_node)

logger = logging.getLogger(__name__)


# ========================================================================
# ============================ function tables ===========================
# ========================================================================
@dataclass(frozen=True, eq=False)
class FunctionTable:
    """
    f: {0,1}^n -> C, stored densely by basis index.
    """
    n: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if values.shape[0] != 2 ** self.n:
            raise DimensionMismatchError(f"{values.shape[0]} values given for {self.n} variables")
        object.__setattr__(self, 'values', values)

    def __call__(self, bits: str) -> complex:
        return complex(self.values[int(bits, 2)])

    def as_dict(self, tol: float = settings.TOLERANCE) -> Dict[str, complex]:
        """Nonzero entries keyed by bitstring."""
        return {bitstring(i, self.n): complex(v) for i, v in enumerate(self.values) if abs(v) > tol}


def state_to_function(v: AmplitudeVector) -> FunctionTable:
    return FunctionTable(v.n, v.amps.copy())


def function_to_state(table: FunctionTable) -> AmplitudeVector:
    """Normalized state proportional to the table."""
    norm = float(np.linalg.norm(table.values))
    if norm == 0:
        raise ParameterError("the all-zero function has no state")
    return AmplitudeVector(table.n, table.values / norm)


# ========================================================================
# ============================ tree -> formula ===========================
# ========================================================================
def _leaf_formula(leaf: Leaf) -> Formula:
    """alpha (1 - x) + beta x, written as alpha + (beta - alpha) x."""
    slope = leaf.beta - leaf.alpha
    if slope == 0:
        return Const(leaf.alpha)
    variable = scaled(slope, Var(leaf.qubit))
    return variable if leaf.alpha == 0 else Add(Const(leaf.alpha), variable)


def tree_to_formula(tree: StateTree) -> Formula:
    """
    Multilinear formula whose value at every x in {0,1}^n is the amplitude of |x>.
    Gates of larger fan-in become balanced binary gates, tensor products become products,
    and plus-edge coefficients become constant factors.
    """
    memo: Dict[int, Formula] = {}

    def walk(node: TreeNode) -> Formula:
        key = id(node)
        if key not in memo:
            if isinstance(node, Leaf):
                memo[key] = _leaf_formula(node)
            elif isinstance(node, Tensor):
                memo[key] = product_of([walk(child) for child in node.children])
            else:
                memo[key] = sum_of([scaled(c, walk(child)) for c, child in node.children])
        return memo[key]

    result = walk(tree.root)
    logger.debug("tree of size %d -> formula of size %d", tree.size, result.size)
    return result


# ========================================================================
# ============================ formula -> tree ===========================
# ========================================================================
_Piece = Tuple[complex, Optional[TreeNode]]  # scalar * state(node); node None means the scalar alone


def _ones(qubits) -> TreeNode:
    """x + (1 - x) on each qubit, i.e. the unnormalized |0> + |1> leaves."""
    leaves = [Leaf(q, 1, 1) for q in qubits]
    return leaves[0] if len(leaves) == 1 else Tensor(tuple(leaves))


def _pad(piece: _Piece, have: int, want: int) -> _Piece:
    scalar, node = piece
    missing = mask_qubits(want & ~have)
    if not missing:
        return piece
    if node is None:
        return scalar, _ones(missing)
    return scalar, _join_tensor(node, _ones(missing))


def _join_tensor(a: TreeNode, b: TreeNode) -> TreeNode:
    parts = []
    for node in (a, b):
        parts.extend(node.children if isinstance(node, Tensor) else (node,))
    return Tensor(tuple(parts))


def _max_linear_leaf(qubit: int, pieces) -> Leaf:
    """Collapses a + b x on a single variable to the leaf a|0> + (a+b)|1>."""
    alpha = beta = 0j
    for scalar, node in pieces:
        if node is None:
            alpha += scalar
            beta += scalar
        else:
            assert isinstance(node, Leaf) and node.qubit == qubit, "single-variable subformula is not a leaf"
            alpha += scalar * node.alpha
            beta += scalar * node.beta
    return Leaf(qubit, alpha, beta)


def formula_to_tree(f: Formula, n: int, tol: float = settings.TOLERANCE) -> StateTree:
    """
    State tree for the state proportional to f on {0,1}^n.

    The formula is made syntactic; each + gate gets both operands padded to its variable set by
    factors x_i + (1 - x_i); + gates over a single variable collapse to leaves; x gates become
    tensor products. Edge coefficients are then rescaled so that every vertex is normalized.

    :raises NotMultilinearError: for non-multilinear f
    :raises ParameterError: for the zero function
    """
    if f.variables >> n:
        raise ParameterError(f"formula uses variables beyond x{n}")
    f = make_syntactic(f)
    memo: Dict[int, _Piece] = {}

    def walk(node: Formula) -> _Piece:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            piece: _Piece = node.value, None
        elif isinstance(node, Var):
            piece = 1 + 0j, Leaf(node.index, 0, 1)
        elif isinstance(node, Mul):
            (sa, na), (sb, nb) = walk(node.left), walk(node.right)
            if na is None or nb is None:
                piece = sa * sb, nb if na is None else na
            else:
                piece = sa * sb, _join_tensor(na, nb)
        else:
            left, right = walk(node.left), walk(node.right)
            mask = node.variables
            if mask == 0:
                piece = left[0] + right[0], None
            elif bin(mask).count('1') == 1:
                piece = 1 + 0j, _max_linear_leaf(mask_qubits(mask)[0], (left, right))
            else:
                left = _pad(left, node.left.variables, mask)
                right = _pad(right, node.right.variables, mask)
                piece = 1 + 0j, Plus(((left[0], left[1]), (right[0], right[1])))
        memo[key] = piece
        return piece

    scalar, root = _pad(walk(f), f.variables, full_mask(n))
    norm, normalized = normalize_node(root, tol)
    if normalized is None or abs(scalar) * norm <= tol:
        raise ParameterError("the zero function has no state")
    phase = scalar / abs(scalar)
    if abs(phase - 1) > tol:
        normalized = Plus(((phase, normalized),))
    tree = StateTree(normalized, n)
    logger.debug("formula of size %d -> tree of size %d on %d qubits", f.size, tree.size, n)
    return tree


# ========================================================================
# ============================ error accounting ==========================
# ========================================================================
def formula_l2_error(f: Formula, v: AmplitudeVector) -> float:
    """sum_x |f(x) - v_x|^2"""
    return float(np.sum(np.abs(formula_table(f, v.n) - v.amps) ** 2))


def formula_inner_error_bound(eps: float) -> float:
    """
    Bound on formula_l2_error(tree_to_formula(T), psi) for a tree with |<T|psi>|^2 >= 1 - eps
    and real positive overlap.
    """
    return eps_to_delta(eps)


def tree_formula_agreement(tree: StateTree, max_qubits: int = settings.MAX_QUBITS) -> float:
    """Largest |formula(x) - amplitude(x)| over {0,1}^n for the formula of the tree."""
    values = formula_table(tree_to_formula(tree), tree.n)
    return float(np.max(np.abs(values - evaluate(tree, max_qubits).amps)))
