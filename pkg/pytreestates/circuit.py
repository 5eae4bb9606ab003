# -*- coding: utf-8 -*-
"""
State-preparation circuits compiled from orthogonal state trees, and a dense simulator.

Classes:

    Prep
    Unitary
    ControlledSub
    OrNot
    Circuit
    PrepareReport

Wires are numbered from 1: data qubits 1..n_data, then ancillas. Every ancilla starts and
ends in |0>. A plus vertex alpha T1 + beta T2 with <T1|T2> = 0 is prepared by

    prep ancilla -> alpha|0> + beta|1>
    controlled on the ancilla: V then U^-1     (U prepares T1, V prepares T2)
    flip the ancilla iff the register is not all zero
    U

which leaves the ancilla in |0> because U^-1 V|0...0> has no |0...0> component.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np

from pytreestates import settings
from pytreestates.errors import (DimensionMismatchError, InvalidTreeError, NotOrthogonalError, OversizeError,
                                 ParameterError, PrepOnNonzeroError)
from pytreestates.state_tree import (AmplitudeVector, Leaf, Plus, StateTree, Tensor, TreeClass, TreeNode,
                                     check_unitary, classify_tree, evaluate, fidelity, mask_qubits, validate)

logger = logging.getLogger(__name__)

MAX_UNITARY_QUBITS = 3


# ========================================================================
# ================================ gates =================================
# ========================================================================
@dataclass(frozen=True)
class Prep:
    """|0> -> alpha|0> + beta|1> on a qubit that is known to be |0>."""
    qubit: int
    alpha: complex
    beta: complex

    @property
    def wires(self) -> Tuple[int, ...]:
        return self.qubit,

    def matrix(self) -> np.ndarray:
        """A unitary whose first column is (alpha, beta)."""
        a, b = complex(self.alpha), complex(self.beta)
        return np.array([[a, -b.conjugate()], [b, a.conjugate()]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Unitary:
    qubits: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'qubits', tuple(self.qubits))
        k = len(self.qubits)
        if not 1 <= k <= MAX_UNITARY_QUBITS:
            raise ParameterError(f"unitary gates act on 1 to {MAX_UNITARY_QUBITS} qubits, got {k}")
        matrix = check_unitary(self.matrix)
        if matrix.shape != (2 ** k, 2 ** k):
            raise DimensionMismatchError(f"{k} qubits need a {2 ** k}x{2 ** k} matrix, got {matrix.shape}")
        object.__setattr__(self, 'matrix', matrix)

    @property
    def wires(self) -> Tuple[int, ...]:
        return self.qubits


@dataclass(frozen=True)
class ControlledSub:
    """body applied on the subspace where the control qubit equals polarity."""
    control: int
    polarity: int
    body: "Circuit"

    @property
    def wires(self) -> Tuple[int, ...]:
        return (self.control,) + tuple(q for gate in self.body.gates for q in gate.wires)


@dataclass(frozen=True)
class OrNot:
    """X on target iff the register is not all zero."""
    target: int
    register: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'register', tuple(self.register))

    @property
    def wires(self) -> Tuple[int, ...]:
        return (self.target,) + self.register


Gate = Union[Prep, Unitary, ControlledSub, OrNot]


@dataclass(frozen=True)
class Circuit:
    n_data: int
    n_ancilla: int
    gates: Tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'gates', tuple(self.gates))
        for gate in self.gates:
            for q in gate.wires:
                if not 1 <= q <= self.width:
                    raise ParameterError(f"gate {type(gate).__name__} uses wire {q} outside 1..{self.width}")

    @property
    def width(self) -> int:
        return self.n_data + self.n_ancilla

    def then(self, other: "Circuit") -> "Circuit":
        """self followed by other."""
        if (self.n_data, self.n_ancilla) != (other.n_data, other.n_ancilla):
            raise DimensionMismatchError("circuits act on different registers")
        return Circuit(self.n_data, self.n_ancilla, self.gates + other.gates)

    def gate_count(self) -> int:
        """Primitive gates, counting every gate inside controlled bodies."""
        return sum(1 + gate.body.gate_count() if isinstance(gate, ControlledSub) else 1 for gate in self.gates)

    def nesting_depth(self) -> int:
        """Maximum number of ControlledSub blocks enclosing a gate."""
        return max((1 + gate.body.nesting_depth() for gate in self.gates if isinstance(gate, ControlledSub)),
                   default=0)


def invert(c: Circuit) -> Circuit:
    """Reversed gate order with every gate replaced by its inverse; OrNot is its own inverse."""
    return Circuit(c.n_data, c.n_ancilla, _inverse_gates(c.gates))


# ========================================================================
# =============================== compiler ===============================
# ========================================================================
def _split_plus(node: Plus, tol: float) -> Tuple[float, TreeNode, float, TreeNode]:
    """
    Halves the children of a normalized orthogonal plus vertex:
    node = alpha T1 + beta T2 with T1, T2 normalized plus vertices and alpha, beta >= 0.
    """
    children = node.children
    half = (len(children) + 1) // 2
    parts = []
    for group in (children[:half], children[half:]):
        weight = float(np.sqrt(sum(abs(c) ** 2 for c, _ in group)))
        parts.append((weight, Plus(tuple((c / weight, child) for c, child in group)) if weight > tol else None))
    (alpha, first), (beta, second) = parts
    return alpha, first, beta, second


class _Compiler:
    def __init__(self, n_data: int, tol: float):
        self.n_data = n_data
        self.tol = tol
        self.ancillas = 0

    def ancilla(self, level: int) -> int:
        self.ancillas = max(self.ancillas, level + 1)
        return self.n_data + level + 1

    def node(self, node: TreeNode, level: int) -> List[Gate]:
        if isinstance(node, Leaf):
            return [Prep(node.qubit, node.alpha, node.beta)]
        if isinstance(node, Tensor):
            return [gate for child in node.children for gate in self.node(child, level)]
        if len(node.children) == 1:
            coefficient, child = node.children[0]
            gates = self.node(child, level)
            phase = coefficient / abs(coefficient)
            if abs(phase - 1) > self.tol:
                gates.append(Unitary((mask_qubits(child.qubits)[0],), phase * np.eye(2)))
            return gates
        alpha, first, beta, second = _split_plus(node, self.tol)
        if first is None or second is None:
            return self.node(first if second is None else second, level)
        ancilla = self.ancilla(level)
        prepare_first = self.node(first, level + 1)
        prepare_second = self.node(second, level + 1)
        body = _Body(prepare_second + _inverse_gates(prepare_first))
        # U^-1 V|0> is orthogonal to |0> on the node qubits together with the deeper ancillas
        deeper = sorted({q for gate in body.gates for q in gate.wires if q > ancilla})
        register = mask_qubits(node.qubits) + tuple(deeper)
        return ([Prep(ancilla, alpha, beta), ControlledSub(ancilla, 1, body), OrNot(ancilla, register)]
                + _as_unitaries(prepare_first))


@dataclass(frozen=True)
class _Body:
    """Gate list awaiting the final register size."""
    gates: List[Gate]


def _inverse_gates(gates: Sequence[Gate]) -> List[Gate]:
    inverted: List[Gate] = []
    for gate in reversed(gates):
        if isinstance(gate, Prep):
            inverted.append(Unitary((gate.qubit,), gate.matrix().conj().T))
        elif isinstance(gate, Unitary):
            inverted.append(Unitary(gate.qubits, gate.matrix.conj().T))
        elif isinstance(gate, ControlledSub):
            body = gate.body
            if isinstance(body, Circuit):
                body = Circuit(body.n_data, body.n_ancilla, _inverse_gates(body.gates))
            else:
                body = _Body(_inverse_gates(body.gates))
            inverted.append(ControlledSub(gate.control, gate.polarity, body))
        else:
            inverted.append(gate)
    return inverted


def _as_unitaries(gates: Sequence[Gate]) -> List[Gate]:
    """Prep gates replaced by their full unitaries, for use on qubits that are not |0>."""
    converted: List[Gate] = []
    for gate in gates:
        if isinstance(gate, Prep):
            gate = Unitary((gate.qubit,), gate.matrix())
        elif isinstance(gate, ControlledSub):
            gate = ControlledSub(gate.control, gate.polarity, _Body(_as_unitaries(gate.body.gates)))
        converted.append(gate)
    return converted


def _seal(gates: Sequence[Gate], n_data: int, n_ancilla: int) -> Circuit:
    sealed = []
    for gate in gates:
        if isinstance(gate, ControlledSub) and isinstance(gate.body, _Body):
            gate = ControlledSub(gate.control, gate.polarity, _seal(gate.body.gates, n_data, n_ancilla))
        sealed.append(gate)
    return Circuit(n_data, n_ancilla, sealed)


def compile_tree(tree: StateTree, max_qubits: int = settings.MAX_QUBITS,
                 tol: float = settings.TOLERANCE) -> Circuit:
    """
    Circuit preparing the state of an orthogonal tree from |0...0>, ancillas returned to |0>.
    Plus vertices of fan-in m are split into halves, so a chain of ceil(log2 m) binary plus
    vertices replaces them; ancillas are reused per plus-nesting level.

    :raises InvalidTreeError: if the tree fails validation
    :raises NotOrthogonalError: if some plus vertex has non-orthogonal children
    """
    violations = validate(tree, max_qubits, tol)
    if violations:
        raise InvalidTreeError(f"tree fails validation: {violations[0].format()}")
    if classify_tree(tree, max_qubits, tol) == TreeClass.GENERAL:
        raise NotOrthogonalError("compile needs a tree whose plus vertices have orthogonal children")
    compiler = _Compiler(tree.n, tol)
    gates = compiler.node(tree.root, 0)
    circuit = _seal(gates, tree.n, compiler.ancillas)
    logger.debug("compiled tree of size %d on %d qubits: %d gates, %d ancillas",
                 tree.size, tree.n, circuit.gate_count(), circuit.n_ancilla)
    return circuit


# ========================================================================
# =============================== simulator ==============================
# ========================================================================
def _slice(width: int, fixed: Sequence[Tuple[int, int]]) -> tuple:
    index = [slice(None)] * width
    for q, value in fixed:
        index[q - 1] = slice(value, value + 1)
    return tuple(index)


def _apply(state: np.ndarray, gate: Gate, controls: List[Tuple[int, int]], tol: float) -> None:
    width = state.ndim
    view = _slice(width, controls)
    sub = state[view]
    if isinstance(gate, Prep):
        excited = sub[_slice(width, [(gate.qubit, 1)])]
        if np.linalg.norm(excited) > tol:
            raise PrepOnNonzeroError(f"prep on qubit {gate.qubit} which is not in |0>")
        state[view] = _apply_matrix(sub, gate.matrix(), (gate.qubit,))
    elif isinstance(gate, Unitary):
        state[view] = _apply_matrix(sub, gate.matrix, gate.qubits)
    elif isinstance(gate, OrNot):
        flipped = np.flip(sub, axis=gate.target - 1).copy()
        zero = _slice(width, [(q, 0) for q in gate.register])
        flipped[zero] = sub[zero]
        state[view] = flipped
    else:
        inner = controls + [(gate.control, gate.polarity)]
        for child in gate.body.gates:
            _apply(state, child, inner, tol)


def _apply_matrix(sub: np.ndarray, matrix: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    k = len(qubits)
    axes = [q - 1 for q in qubits]
    tensor = matrix.reshape((2,) * (2 * k))
    result = np.tensordot(tensor, sub, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(result, list(range(k)), axes)


def simulate(c: Circuit, max_qubits: int = settings.SIMULATOR_MAX_QUBITS,
             tol: float = settings.TOLERANCE) -> AmplitudeVector:
    """
    Dense state of all wires after running c on |0...0>; wire 1 is the most significant bit.

    :raises OversizeError: if data plus ancilla wires exceed max_qubits
    :raises PrepOnNonzeroError: if a prep gate meets a qubit that is not |0>
    """
    if c.width > max_qubits:
        raise OversizeError(f"{c.width} wires exceed the simulator cap of {max_qubits}")
    state = np.zeros((2,) * c.width, dtype=np.complex128)
    state[(0,) * c.width] = 1
    for gate in c.gates:
        _apply(state, gate, [], tol)
    return AmplitudeVector(c.width, state.reshape(-1))


# ========================================================================
# ============================= verification =============================
# ========================================================================
@dataclass
class PrepareReport:
    n: int
    size: int
    fidelity: float
    gates: int
    ancillas: int
    nesting: int

    @property
    def ratio(self) -> float:
        """gates / (tree size * n)"""
        return self.gates / (self.size * self.n)

    def format_lines(self) -> List[str]:
        return ['n\tsize\tgates\tancillas\tnesting\tratio\tfidelity',
                f"{self.n}\t{self.size}\t{self.gates}\t{self.ancillas}\t{self.nesting}\t"
                f"{self.ratio:.6f}\t{self.fidelity:.12f}"]


def with_ancillas(v: AmplitudeVector, n_ancilla: int) -> AmplitudeVector:
    """v (x) |0...0> on n_ancilla extra wires."""
    if n_ancilla == 0:
        return v
    return v.tensor(AmplitudeVector.basis_state('0' * n_ancilla))


def verify_prepare(tree: StateTree, max_qubits: int = settings.SIMULATOR_MAX_QUBITS,
                   tol: float = settings.TOLERANCE) -> PrepareReport:
    circuit = compile_tree(tree, max_qubits, tol)
    output = simulate(circuit, max_qubits, tol)
    value = fidelity(output, with_ancillas(evaluate(tree, max_qubits), circuit.n_ancilla))
    report = PrepareReport(tree.n, tree.size, value, circuit.gate_count(), circuit.n_ancilla,
                           circuit.nesting_depth())
    logger.info("prepared %d-qubit tree of size %d with fidelity %.12f", tree.n, tree.size, value)
    return report


# ========================================================================
# =============================== text format ============================
# ========================================================================
def _number(value: complex) -> str:
    return f"{repr(float(value.real))} {repr(float(value.imag))}"


def _gate_lines(gates: Sequence[Gate], indent: int) -> Iterator[str]:
    pad = '  ' * indent
    for gate in gates:
        if isinstance(gate, Prep):
            yield f"{pad}prep {gate.qubit} {_number(complex(gate.alpha))} {_number(complex(gate.beta))}"
        elif isinstance(gate, Unitary):
            entries = ' '.join(_number(v) for v in gate.matrix.reshape(-1))
            yield f"{pad}u {len(gate.qubits)} {' '.join(map(str, gate.qubits))} {entries}"
        elif isinstance(gate, OrNot):
            yield f"{pad}ornot {gate.target} {' '.join(map(str, gate.register))}"
        else:
            yield f"{pad}csub {gate.control} {gate.polarity} {{"
            yield from _gate_lines(gate.body.gates, indent + 1)
            yield f"{pad}}}"


def format_circuit(c: Circuit) -> str:
    return '\n'.join([f"qubits {c.n_data} {c.n_ancilla}"] + list(_gate_lines(c.gates, 0))) + '\n'


_HEADER = re.compile(r'^qubits\s+(\d+)\s+(\d+)$')


def _complexes(tokens: Sequence[str]) -> List[complex]:
    values = [float(t) for t in tokens]
    return [complex(re_, im) for re_, im in zip(values[0::2], values[1::2])]


def _parse_gates(lines: List[Tuple[int, str]], position: int, n_data: int, n_ancilla: int,
                 nested: bool) -> Tuple[List[Gate], int]:
    gates: List[Gate] = []
    while position < len(lines):
        number, line = lines[position]
        tokens = line.split()
        position += 1
        try:
            if tokens[0] == '}':
                if not nested:
                    raise ParameterError(f"line {number}: unmatched '}}'")
                return gates, position
            if tokens[0] == 'prep' and len(tokens) == 6:
                alpha, beta = _complexes(tokens[2:])
                gates.append(Prep(int(tokens[1]), alpha, beta))
            elif tokens[0] == 'u':
                k = int(tokens[1])
                qubits = tuple(int(t) for t in tokens[2:2 + k])
                entries = _complexes(tokens[2 + k:])
                if len(entries) != 4 ** k or len(tokens) != 2 + k + 2 * 4 ** k:
                    raise ParameterError(f"line {number}: expected {4 ** k} complex matrix entries")
                gates.append(Unitary(qubits, np.array(entries).reshape(2 ** k, 2 ** k)))
            elif tokens[0] == 'ornot' and len(tokens) >= 3:
                gates.append(OrNot(int(tokens[1]), tuple(int(t) for t in tokens[2:])))
            elif tokens[0] == 'csub' and len(tokens) == 4 and tokens[3] == '{':
                body, position = _parse_gates(lines, position, n_data, n_ancilla, True)
                gates.append(ControlledSub(int(tokens[1]), int(tokens[2]), Circuit(n_data, n_ancilla, body)))
            else:
                raise ParameterError(f"line {number}: cannot read gate '{line}'")
        except ValueError as error:
            raise ParameterError(f"line {number}: {error}") from error
    if nested:
        raise ParameterError("unterminated csub block")
    return gates, position


def parse_circuit(text: str) -> Circuit:
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
    lines = [(i, line) for i, line in lines if line and not line.startswith('#')]
    if not lines:
        raise ParameterError("empty circuit file")
    header = _HEADER.match(lines[0][1])
    if header is None:
        raise ParameterError(f"circuit header must be 'qubits D A', got '{lines[0][1]}'")
    n_data, n_ancilla = int(header.group(1)), int(header.group(2))
    gates, _ = _parse_gates(lines, 1, n_data, n_ancilla, False)
    return Circuit(n_data, n_ancilla, gates)
