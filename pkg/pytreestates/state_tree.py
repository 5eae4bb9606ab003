# -*- coding: utf-8 -*-
"""
Quantum state trees and dense amplitude vectors.

Classes:

    TreeClass
    Violation
    AmplitudeVector
    TreeNode
    Leaf
    Plus
    Tensor
    StateTree
    RestrictedTree

Basis convention shared by every module: index(x) = sum_i x_i * 2^(n-i),
so qubit 1 is the most significant bit.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from itertools import combinations
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from pytreestates import settings
from pytreestates.errors import (DimensionMismatchError, InvalidTreeError, NotUnitaryError,
                                 OversizeError, ParameterError)

logger = logging.getLogger(__name__)

SQRT_HALF = 1 / math.sqrt(2)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) * SQRT_HALF


def qubit_mask(qubits) -> int:
    """Bitmask of a collection of 1-based qubit indices (qubit q -> bit q-1)."""
    mask = 0
    for q in qubits:
        mask |= 1 << (q - 1)
    return mask


def mask_qubits(mask: int) -> Tuple[int, ...]:
    """Ascending 1-based qubit indices of a bitmask."""
    result = []
    q = 1
    while mask:
        if mask & 1:
            result.append(q)
        mask >>= 1
        q += 1
    return tuple(result)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def bitstring(index: int, n: int) -> str:
    return format(index, f'0{n}b') if n else ''


def _format_real(value: float) -> str:
    text = '%.15g' % (float(value) + 0.0)
    return '0' if text == '-0' else text


# ========================================================================
# ========================== amplitude vectors ===========================
# ========================================================================
@dataclass(frozen=True, eq=False)
class AmplitudeVector:
    """
    Dense vector of 2^n complex amplitudes, qubit 1 most significant.
    """
    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 2 ** self.n:
            raise DimensionMismatchError(f"{amps.shape[0]} amplitudes given for {self.n} qubits")
        object.__setattr__(self, 'amps', amps)

    @classmethod
    def basis_state(cls, bits: str) -> "AmplitudeVector":
        amps = np.zeros(2 ** len(bits), dtype=np.complex128)
        amps[int(bits, 2) if bits else 0] = 1
        return cls(len(bits), amps)

    @classmethod
    def uniform(cls, n: int, support: Sequence[int]) -> "AmplitudeVector":
        """Uniform superposition over the basis indices in support."""
        support = list(support)
        if not support:
            raise ParameterError("uniform superposition over an empty set")
        amps = np.zeros(2 ** n, dtype=np.complex128)
        amps[support] = 1 / math.sqrt(len(support))
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = settings.TOLERANCE) -> bool:
        return abs(self.norm() ** 2 - 1) <= tol

    def normalized(self) -> "AmplitudeVector":
        norm = self.norm()
        if norm == 0:
            raise ParameterError("cannot normalize the zero vector")
        return AmplitudeVector(self.n, self.amps / norm)

    def amplitude(self, bits: str) -> complex:
        return complex(self.amps[int(bits, 2)])

    def support(self, tol: float = settings.TOLERANCE) -> np.ndarray:
        """Indices with |amplitude| > tol."""
        return np.flatnonzero(np.abs(self.amps) > tol)

    def as_tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n)

    def tensor(self, other: "AmplitudeVector") -> "AmplitudeVector":
        return AmplitudeVector(self.n + other.n, np.kron(self.amps, other.amps))

    def format_lines(self, drop_zeros: bool = False, tol: float = settings.TOLERANCE) -> List[str]:
        """
        One line per basis state: "BITSTRING RE IM", lexicographic order.

        :param drop_zeros: omit amplitudes with modulus <= tol
        """
        lines = []
        for index, value in enumerate(self.amps):
            if drop_zeros and abs(value) <= tol:
                continue
            lines.append(f"{bitstring(index, self.n)} {_format_real(value.real)} {_format_real(value.imag)}")
        return lines

    @classmethod
    def parse_lines(cls, text: str) -> "AmplitudeVector":
        """
        Inverse of format_lines; omitted basis states are zero.
        """
        entries = []
        for line in text.splitlines():
            line = line.split(';', 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3 or set(parts[0]) - {'0', '1'}:
                raise ParameterError(f"malformed amplitude line '{line}'")
            entries.append((parts[0], complex(float(parts[1]), float(parts[2]))))
        if not entries:
            raise ParameterError("no amplitudes given")
        n = len(entries[0][0])
        amps = np.zeros(2 ** n, dtype=np.complex128)
        for bits, value in entries:
            if len(bits) != n:
                raise DimensionMismatchError(f"bitstring '{bits}' does not have {n} bits")
            amps[int(bits, 2) if n else 0] = value
        return cls(n, amps)


def _check_same_dimension(a: AmplitudeVector, b: AmplitudeVector) -> None:
    if a.n != b.n:
        raise DimensionMismatchError(f"vectors on {a.n} and {b.n} qubits")


def inner(a: AmplitudeVector, b: AmplitudeVector) -> complex:
    """<a|b>"""
    _check_same_dimension(a, b)
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: AmplitudeVector, b: AmplitudeVector) -> float:
    """|<a|b>|^2 of two normalized vectors."""
    return abs(inner(a, b)) ** 2


def l2_distance2(a: AmplitudeVector, b: AmplitudeVector) -> float:
    """Sum over x of |a_x - b_x|^2."""
    _check_same_dimension(a, b)
    return float(np.sum(np.abs(a.amps - b.amps) ** 2))


def eps_to_delta(eps: float) -> float:
    """
    Squared 2-norm error of the formula obtained from a tree with fidelity 1 - eps:
    delta = 2 - 2 sqrt(1 - eps).
    """
    if not 0 <= eps <= 1:
        raise ParameterError(f"eps must lie in [0, 1], got {eps}")
    return 2 - 2 * math.sqrt(1 - eps)


# ========================================================================
# ============================== tree nodes ==============================
# ========================================================================
class TreeNode(ABC):
    """
    Vertex of a state tree. S(v) is exposed as the bitmask `qubits`.
    """

    @property
    @abstractmethod
    def qubits(self) -> int:
        pass

    @abstractmethod
    def child_nodes(self) -> Tuple["TreeNode", ...]:
        pass

    @cached_property
    def size(self) -> int:
        """Number of leaf vertices."""
        return sum(child.size for child in self.child_nodes())

    @cached_property
    def depth(self) -> int:
        """Maximum number of edges from this vertex down to a leaf."""
        children = self.child_nodes()
        return 1 + max(child.depth for child in children) if children else 0


@dataclass(frozen=True)
class Leaf(TreeNode):
    """alpha|0> + beta|1> on a single qubit."""
    qubit: int
    alpha: complex
    beta: complex

    def __post_init__(self):
        if self.qubit < 1:
            raise ParameterError(f"qubit indices start at 1, got {self.qubit}")
        object.__setattr__(self, 'alpha', complex(self.alpha))
        object.__setattr__(self, 'beta', complex(self.beta))

    @classmethod
    def bit(cls, qubit: int, value: int) -> "Leaf":
        return cls(qubit, 1 - value, value)

    @classmethod
    def plus(cls, qubit: int) -> "Leaf":
        return cls(qubit, SQRT_HALF, SQRT_HALF)

    @classmethod
    def minus(cls, qubit: int) -> "Leaf":
        return cls(qubit, SQRT_HALF, -SQRT_HALF)

    @property
    def qubits(self) -> int:
        return 1 << (self.qubit - 1)

    def child_nodes(self) -> tuple:
        return ()

    @cached_property
    def size(self) -> int:
        return 1

    def is_classical(self) -> bool:
        """True for |0> and |1> leaves."""
        return (self.alpha == 0) != (self.beta == 0)


@dataclass(frozen=True)
class Plus(TreeNode):
    """Linear combination; every child carries its edge coefficient."""
    children: Tuple[Tuple[complex, TreeNode], ...]

    def __post_init__(self):
        object.__setattr__(self, 'children', tuple((complex(c), node) for c, node in self.children))

    @cached_property
    def qubits(self) -> int:
        mask = 0
        for _, child in self.children:
            mask |= child.qubits
        return mask

    def child_nodes(self) -> Tuple[TreeNode, ...]:
        return tuple(child for _, child in self.children)


@dataclass(frozen=True)
class Tensor(TreeNode):
    """Tensor product of children on pairwise disjoint qubit sets."""
    children: Tuple[TreeNode, ...]

    def __post_init__(self):
        object.__setattr__(self, 'children', tuple(self.children))

    @cached_property
    def qubits(self) -> int:
        mask = 0
        for child in self.children:
            mask |= child.qubits
        return mask

    def child_nodes(self) -> Tuple[TreeNode, ...]:
        return self.children


def product_node(bits: Sequence[int], qubits: Sequence[int]) -> TreeNode:
    """Classical basis state |bits> on the given qubits."""
    leaves = [Leaf.bit(q, b) for q, b in zip(qubits, bits)]
    return leaves[0] if len(leaves) == 1 else Tensor(leaves)


@dataclass(frozen=True)
class StateTree:
    """
    Rooted state tree over qubits 1..n.
    """
    root: TreeNode
    n: int

    @property
    def size(self) -> int:
        return self.root.size

    @property
    def depth(self) -> int:
        return self.root.depth

    def leaves(self) -> Iterator[Leaf]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                yield node
            else:
                stack.extend(reversed(node.child_nodes()))

    def vertices(self) -> Iterator[Tuple[Tuple[int, ...], TreeNode]]:
        """Pre-order (path, vertex) pairs; the path lists child positions from the root."""
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            yield path, node
            children = node.child_nodes()
            for i in reversed(range(len(children))):
                stack.append((path + (i,), children[i]))


def tree_size(tree: StateTree) -> int:
    return tree.size


def depth(tree: StateTree) -> int:
    return tree.depth


# ========================================================================
# ============================== evaluation ==============================
# ========================================================================
_Part = Tuple[Tuple[int, ...], np.ndarray]  # (ascending qubit labels, tensor of shape (2,)*len)


def _combine_tensor(parts: Sequence[_Part]) -> _Part:
    labels: Tuple[int, ...] = ()
    array = np.ones((), dtype=np.complex128)
    for child_labels, child_array in parts:
        array = np.multiply.outer(array, child_array)
        labels += child_labels
    order = np.argsort(labels)
    return tuple(labels[i] for i in order), array.transpose(order)


def _combine_plus(coefficients: Sequence[complex], parts: Sequence[_Part]) -> _Part:
    labels = parts[0][0]
    array = sum(c * part[1] for c, part in zip(coefficients, parts))
    return labels, array


def _node_tensor(node: TreeNode, memo: Dict[int, _Part]) -> _Part:
    key = id(node)
    if key in memo:
        return memo[key]
    if isinstance(node, Leaf):
        result = (node.qubit,), np.array([node.alpha, node.beta], dtype=np.complex128)
    elif isinstance(node, Tensor):
        if not node.children:
            raise InvalidTreeError("tensor gate without children")
        parts = [_node_tensor(child, memo) for child in node.children]
        for (a, _), (b, _) in combinations(parts, 2):
            if set(a) & set(b):
                raise InvalidTreeError(f"tensor children overlap on qubits {sorted(set(a) & set(b))}")
        result = _combine_tensor(parts)
    elif isinstance(node, Plus):
        if not node.children:
            raise InvalidTreeError("plus gate without children")
        parts = [_node_tensor(child, memo) for _, child in node.children]
        if any(part[0] != parts[0][0] for part in parts):
            raise InvalidTreeError("plus children act on different qubit sets")
        result = _combine_plus([c for c, _ in node.children], parts)
    else:
        raise InvalidTreeError(f"unknown vertex type {type(node).__name__}")
    memo[key] = result
    return result


def evaluate_node(node: TreeNode) -> Tuple[Tuple[int, ...], np.ndarray]:
    """
    State of a subtree on its own qubits.

    :return: (ascending qubit labels, flat amplitude array in the global bit order restricted to them)
    """
    labels, array = _node_tensor(node, {})
    return labels, array.reshape(-1)


def evaluate(tree: StateTree, max_qubits: int = settings.MAX_QUBITS) -> AmplitudeVector:
    """
    Amplitude vector represented by the tree.

    :param tree: StateTree whose root acts on qubits 1..n
    :param max_qubits: refuse larger trees (OversizeError)
    :return: AmplitudeVector
    """
    if tree.n > max_qubits:
        raise OversizeError(f"{tree.n} qubits exceed the evaluation cap of {max_qubits}")
    labels, array = _node_tensor(tree.root, {})
    if labels != tuple(range(1, tree.n + 1)):
        raise InvalidTreeError(f"root acts on qubits {labels}, expected 1..{tree.n}")
    return AmplitudeVector(tree.n, array.reshape(-1))


# ========================================================================
# ============================== validation ==============================
# ========================================================================
@dataclass(frozen=True)
class Violation:
    """A broken structural or normalization rule at one vertex."""
    path: Tuple[int, ...]
    rule: str
    value: Optional[float] = None

    def format(self) -> str:
        where = '.'.join(str(i) for i in self.path) or 'root'
        value = '' if self.value is None else _format_real(self.value)
        return f"{where}\t{self.rule}\t{value}".rstrip()


def validate(tree: StateTree, max_qubits: int = settings.MAX_QUBITS,
             tol: float = settings.TOLERANCE) -> List[Violation]:
    """
    Checks the state tree rules: leaves act on one qubit inside 1..n, the root covers 1..n,
    plus children share their parent's qubit set, tensor children partition it, and every
    vertex represents a normalized state.

    :return: list of Violation, empty for a valid tree
    """
    if tree.n > max_qubits:
        return [Violation((), 'oversize', float(tree.n))]
    violations: List[Violation] = []
    if tree.root.qubits != full_mask(tree.n):
        violations.append(Violation((), 'root-qubitset-mismatch', float(tree.root.qubits)))

    def walk(node: TreeNode, path: Tuple[int, ...]) -> Optional[_Part]:
        result: Optional[_Part] = None
        if isinstance(node, Leaf):
            if node.qubit > tree.n:
                violations.append(Violation(path, 'leaf-qubit-out-of-range', float(node.qubit)))
            result = (node.qubit,), np.array([node.alpha, node.beta], dtype=np.complex128)
        elif isinstance(node, Tensor):
            parts = [walk(child, path + (i,)) for i, child in enumerate(node.children)]
            if not node.children:
                violations.append(Violation(path, 'empty-gate'))
                return None
            overlap = any(a.qubits & b.qubits for a, b in combinations(node.children, 2))
            if overlap:
                violations.append(Violation(path, 'tensor-children-overlap'))
            if not overlap and all(part is not None for part in parts):
                result = _combine_tensor(parts)
        elif isinstance(node, Plus):
            parts = [walk(child, path + (i,)) for i, (_, child) in enumerate(node.children)]
            if not node.children:
                violations.append(Violation(path, 'empty-gate'))
                return None
            first = node.children[0][1].qubits
            mismatch = [i for i, (_, child) in enumerate(node.children) if child.qubits != first]
            for i in mismatch:
                violations.append(Violation(path + (i,), 'plus-children-qubitset-mismatch'))
            if not mismatch and all(part is not None for part in parts):
                result = _combine_plus([c for c, _ in node.children], parts)
        else:
            violations.append(Violation(path, 'unknown-vertex'))
            return None
        if result is not None:
            norm = float(np.linalg.norm(result[1]))
            if abs(norm - 1) > tol:
                violations.append(Violation(path, 'vertex-not-normalized', norm))
        return result

    walk(tree.root, ())
    violations.sort(key=lambda v: v.path)
    return violations


# ========================================================================
# ============================ classification ============================
# ========================================================================
class TreeClass(IntEnum):
    """
    Strongest orthogonality property of a tree (larger is stronger).
    """
    GENERAL = 0
    ORTHOGONAL = 1
    MANIFESTLY_ORTHOGONAL = 2

    @property
    def label(self) -> str:
        return self.name.lower().replace('_', '-')

    @classmethod
    def from_label(cls, label: str) -> "TreeClass":
        return cls[label.upper().replace('-', '_')]


def classify_tree(tree: StateTree, max_qubits: int = settings.MAX_QUBITS,
                  tol: float = settings.TOLERANCE) -> TreeClass:
    """
    manifestly-orthogonal if the children of every plus vertex have disjoint supports,
    orthogonal if they are pairwise orthogonal, general otherwise.
    """
    if tree.n > max_qubits:
        raise OversizeError(f"{tree.n} qubits exceed the evaluation cap of {max_qubits}")
    memo: Dict[int, _Part] = {}
    result = TreeClass.MANIFESTLY_ORTHOGONAL
    for _, node in tree.vertices():
        if not isinstance(node, Plus):
            continue
        vectors = [_node_tensor(child, memo)[1].reshape(-1) for _, child in node.children]
        for a, b in combinations(vectors, 2):
            disjoint = not np.any((np.abs(a) > tol) & (np.abs(b) > tol))
            if disjoint:
                continue
            if abs(np.vdot(a, b)) < tol:
                result = min(result, TreeClass.ORTHOGONAL)
            else:
                return TreeClass.GENERAL
    return result


# ========================================================================
# ============================== transforms ==============================
# ========================================================================
def map_leaves(node: TreeNode, transform: Callable[[Leaf], TreeNode]) -> TreeNode:
    """Rebuilds a subtree with every leaf replaced by transform(leaf)."""
    if isinstance(node, Leaf):
        return transform(node)
    if isinstance(node, Tensor):
        return Tensor(tuple(map_leaves(child, transform) for child in node.children))
    return Plus(tuple((c, map_leaves(child, transform)) for c, child in node.children))


def relabel_node(node: TreeNode, mapping: Mapping[int, int]) -> TreeNode:
    return map_leaves(node, lambda leaf: Leaf(mapping[leaf.qubit], leaf.alpha, leaf.beta))


def _restrict_node(node: TreeNode, assignment: Mapping[int, int]) -> Tuple[complex, Optional[TreeNode]]:
    if isinstance(node, Leaf):
        if node.qubit in assignment:
            return (node.beta if assignment[node.qubit] else node.alpha), None
        return 1 + 0j, node
    if isinstance(node, Tensor):
        scalar = 1 + 0j
        kept = []
        for child in node.children:
            weight, rest = _restrict_node(child, assignment)
            scalar *= weight
            if rest is not None:
                kept.append(rest)
        if not kept:
            return scalar, None
        return scalar, kept[0] if len(kept) == 1 else Tensor(tuple(kept))
    results = [(c, _restrict_node(child, assignment)) for c, child in node.children]
    remaining = [rest is not None for _, (_, rest) in results]
    if not any(remaining):
        return sum(c * weight for c, (weight, _) in results), None
    if not all(remaining):
        raise InvalidTreeError("plus children act on different qubit sets")
    return 1 + 0j, Plus(tuple((c * weight, rest) for c, (weight, rest) in results))


@dataclass(frozen=True)
class RestrictedTree:
    """
    weight * tree is the slice of the original state with the assigned qubits fixed.
    The tree acts on the unassigned qubits renumbered 1..m in their original order;
    it is None when every qubit was assigned. Vertices are generally not normalized.
    """
    weight: complex
    tree: Optional[StateTree]
    kept_qubits: Tuple[int, ...]

    def vector(self, max_qubits: int = settings.MAX_QUBITS) -> np.ndarray:
        if self.tree is None:
            return np.array([self.weight], dtype=np.complex128)
        if self.tree.n > max_qubits:
            raise OversizeError(f"{self.tree.n} qubits exceed the evaluation cap of {max_qubits}")
        labels, array = _node_tensor(self.tree.root, {})
        return self.weight * array.reshape(-1)


def restrict(tree: StateTree, assignment: Mapping[int, int]) -> RestrictedTree:
    """
    Fixes the qubits in assignment: each leaf on an assigned qubit is replaced by the scalar
    alpha (bit 0) or beta (bit 1), absorbed into the edge coefficients above it.

    :param assignment: qubit -> bit
    :return: RestrictedTree
    """
    for q, b in assignment.items():
        if not 1 <= q <= tree.n or b not in (0, 1):
            raise ParameterError(f"invalid assignment {q} -> {b} for {tree.n} qubits")
    weight, node = _restrict_node(tree.root, assignment)
    kept = tuple(q for q in range(1, tree.n + 1) if q not in assignment)
    if node is None:
        return RestrictedTree(weight, None, kept)
    mapping = {q: i + 1 for i, q in enumerate(kept)}
    return RestrictedTree(weight, StateTree(relabel_node(node, mapping), len(kept)), kept)


def normalize_node(node: TreeNode, tol: float = settings.TOLERANCE) -> Tuple[float, Optional[TreeNode]]:
    """
    Rescales edge coefficients so that every vertex is normalized, dropping zero branches.

    :return: (norm, normalized subtree) with norm * state(normalized) = state(node);
             (0, None) for the zero state
    """
    if isinstance(node, Leaf):
        norm = math.hypot(abs(node.alpha), abs(node.beta))
        if norm <= tol:
            return 0.0, None
        return norm, Leaf(node.qubit, node.alpha / norm, node.beta / norm)
    if isinstance(node, Tensor):
        norm = 1.0
        children = []
        for child in node.children:
            child_norm, child_node = normalize_node(child, tol)
            if child_node is None:
                return 0.0, None
            norm *= child_norm
            children.append(child_node)
        return norm, Tensor(tuple(children))
    children = []
    for c, child in node.children:
        child_norm, child_node = normalize_node(child, tol)
        if child_node is not None and abs(c) * child_norm > tol:
            children.append((c * child_norm, child_node))
    if not children:
        return 0.0, None
    candidate = Plus(tuple(children))
    norm = float(np.linalg.norm(evaluate_node(candidate)[1]))
    if norm <= tol:
        return 0.0, None
    return norm, Plus(tuple((c / norm, child) for c, child in children))


def check_unitary(matrix, tol: float = settings.TOLERANCE) -> np.ndarray:
    """
    :return: matrix as complex ndarray
    :raises NotUnitaryError: if U^dagger U differs from the identity by more than tol
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"unitary must be square, got shape {matrix.shape}")
    deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))
    if deviation > tol:
        raise NotUnitaryError(f"matrix deviates from unitarity by {deviation:.3g}")
    return matrix


def _column_node(column: np.ndarray, qubits: Sequence[int], tol: float) -> TreeNode:
    """Normalized k-qubit state as a leaf (k=1) or a sum of classical products."""
    if len(qubits) == 1:
        return Leaf(qubits[0], column[0], column[1])
    k = len(qubits)
    terms = []
    for x in np.flatnonzero(np.abs(column) > tol):
        bits = [(int(x) >> (k - 1 - i)) & 1 for i in range(k)]
        terms.append((column[x], product_node(bits, qubits)))
    return Plus(tuple(terms))


def apply_local_unitary(tree: StateTree, unitary, qubits: Sequence[int],
                        tol: float = settings.TOLERANCE) -> StateTree:
    """
    Tree for U|psi> where U acts on the listed qubits (first listed = most significant bit of U).
    Built as sum_y (U|y>) (x) T_y with T_y the restriction of the tree to y on those qubits,
    hence of size at most k 4^k |T|.

    :param unitary: 2^k x 2^k unitary, k <= 4
    :param qubits: k distinct qubit indices
    """
    qubits = list(qubits)
    k = len(qubits)
    if not 1 <= k <= 4:
        raise ParameterError(f"local unitaries act on 1 to 4 qubits, got {k}")
    if len(set(qubits)) != k or not all(1 <= q <= tree.n for q in qubits):
        raise ParameterError(f"invalid qubit list {qubits} for {tree.n} qubits")
    unitary = check_unitary(unitary, tol)
    if unitary.shape != (2 ** k, 2 ** k):
        raise DimensionMismatchError(f"{k} qubits need a {2 ** k}x{2 ** k} unitary, got {unitary.shape}")

    terms = []
    for y in range(2 ** k):
        bits = [(y >> (k - 1 - i)) & 1 for i in range(k)]
        weight, rest = _restrict_node(tree.root, dict(zip(qubits, bits)))
        if rest is None:
            rest_norm, rest_node = 1.0, None
        else:
            rest_norm, rest_node = normalize_node(rest, tol)
            if rest_node is None:
                continue
        coefficient = weight * rest_norm
        if abs(coefficient) <= tol:
            continue
        column = _column_node(unitary[:, y], qubits, tol)
        terms.append((coefficient, column if rest_node is None else Tensor((column, rest_node))))
    if not terms:
        raise InvalidTreeError("tree represents the zero vector")
    root = terms[0][1] if len(terms) == 1 and abs(terms[0][0] - 1) <= tol else Plus(tuple(terms))
    result = StateTree(root, tree.n)
    logger.debug("local unitary on %s: size %d -> %d", qubits, tree.size, result.size)
    return result


def local_basis_change(tree: StateTree, gates: Union[Mapping[int, object], Sequence[object]],
                       tol: float = settings.TOLERANCE) -> StateTree:
    """
    Applies one 2x2 unitary per qubit by substituting every leaf.

    :param gates: qubit -> 2x2 unitary, or a sequence indexed from qubit 1; missing qubits keep identity
    """
    if not isinstance(gates, Mapping):
        gates = {i + 1: gate for i, gate in enumerate(gates)}
    checked = {}
    for q, gate in gates.items():
        gate = check_unitary(gate, tol)
        if gate.shape != (2, 2):
            raise DimensionMismatchError(f"gate on qubit {q} is not 2x2")
        checked[q] = gate

    def substitute(leaf: Leaf) -> Leaf:
        gate = checked.get(leaf.qubit)
        if gate is None:
            return leaf
        alpha, beta = gate @ np.array([leaf.alpha, leaf.beta])
        return Leaf(leaf.qubit, alpha, beta)

    return StateTree(map_leaves(tree.root, substitute), tree.n)


def apply_dense_unitary(vector: AmplitudeVector, unitary, qubits: Sequence[int]) -> AmplitudeVector:
    """Dense reference: U on the listed qubits of a vector (first listed = most significant)."""
    unitary = np.asarray(unitary, dtype=np.complex128)
    k = len(qubits)
    axes = [q - 1 for q in qubits]
    state = vector.as_tensor()
    gate = unitary.reshape((2,) * (2 * k))
    state = np.tensordot(gate, state, axes=(list(range(k, 2 * k)), axes))
    state = np.moveaxis(state, list(range(k)), axes)
    return AmplitudeVector(vector.n, state.reshape(-1))
