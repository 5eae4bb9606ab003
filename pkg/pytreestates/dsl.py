# -*- coding: utf-8 -*-
"""
Reading and writing the s-expression text formats for state trees and formulas.

Tree grammar (';' starts a comment running to the end of the line):

    node   := leaf | plus | tensor
    leaf   := "(leaf" INT COMPLEX COMPLEX ")"
    plus   := "(+" {"(" COMPLEX node ")"}+ ")"
    tensor := "(*" node+ ")"

Formula grammar: "(+ f g)", "(* f g)", "(var i)", "(const COMPLEX)".

COMPLEX is a float optionally followed by a signed imaginary part, e.g. 0.5 or -0.5+0.5i.

Classes:

    Atom
    SList
"""
import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

from pytreestates.errors import DslSyntaxError
from pytreestates.formula import Add, Const, Formula, Mul, Var
from pytreestates.state_tree import Leaf, Plus, StateTree, Tensor, TreeNode

_FLOAT = r'[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'
_UNSIGNED = r'(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?'
_COMPLEX = re.compile(rf'^({_FLOAT})(?:([+-])({_UNSIGNED})i)?$')
_INT = re.compile(r'^\d+$')


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class SList:
    items: Tuple[Union[Atom, "SList"], ...]
    line: int
    column: int


Expr = Union[Atom, SList]


# ========================================================================
# ================================ reader ================================
# ========================================================================
class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.column = 1

    def _advance(self):
        if self.text[self.i] == '\n':
            self.line += 1
            self.column = 1
        else:
            self.column += 1
        self.i += 1

    def skip_whitespace(self):
        while self.i < len(self.text):
            ch = self.text[self.i]
            if ch == ';':
                while self.i < len(self.text) and self.text[self.i] != '\n':
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_whitespace()
        return self.i >= len(self.text)

    def read(self) -> Expr:
        self.skip_whitespace()
        if self.i >= len(self.text):
            raise DslSyntaxError("unexpected end of input", self.line, self.column)
        ch = self.text[self.i]
        line, column = self.line, self.column
        if ch == ')':
            raise DslSyntaxError("unbalanced ')'", line, column)
        if ch == '(':
            self._advance()
            items = []
            while True:
                self.skip_whitespace()
                if self.i >= len(self.text):
                    raise DslSyntaxError("list opened here is not closed", line, column)
                if self.text[self.i] == ')':
                    self._advance()
                    return SList(tuple(items), line, column)
                items.append(self.read())
        start = self.i
        while self.i < len(self.text) and not self.text[self.i].isspace() and self.text[self.i] not in '();':
            self._advance()
        return Atom(self.text[start:self.i], line, column)


def read_expression(text: str) -> Expr:
    """Reads exactly one s-expression; trailing content is an error."""
    reader = _Reader(text)
    expr = reader.read()
    if not reader.at_end():
        raise DslSyntaxError("unexpected content after expression", reader.line, reader.column)
    return expr


# ========================================================================
# ================================ scalars ===============================
# ========================================================================
def parse_complex(atom: Expr) -> complex:
    if not isinstance(atom, Atom):
        raise DslSyntaxError("expected a number", atom.line, atom.column)
    match = _COMPLEX.match(atom.text)
    if match is None:
        raise DslSyntaxError(f"malformed number '{atom.text}'", atom.line, atom.column)
    real = float(match.group(1))
    imag = 0.0
    if match.group(2):
        imag = float(match.group(3)) * (-1 if match.group(2) == '-' else 1)
    return complex(real, imag)


def format_complex(value: complex) -> str:
    """Shortest text that parses back to exactly the same complex number."""
    value = complex(value)
    real = repr(value.real + 0.0)
    if value.imag == 0:
        return real
    sign = '-' if value.imag < 0 else '+'
    return f"{real}{sign}{repr(abs(value.imag))}i"


def _parse_int(atom: Expr) -> int:
    if not isinstance(atom, Atom) or not _INT.match(atom.text):
        raise DslSyntaxError("expected a non-negative integer", atom.line, atom.column)
    return int(atom.text)


def _head(expr: Expr) -> Optional[str]:
    if isinstance(expr, SList) and expr.items and isinstance(expr.items[0], Atom):
        return expr.items[0].text
    return None


# ========================================================================
# ================================ trees =================================
# ========================================================================
def _to_node(expr: Expr) -> TreeNode:
    head = _head(expr)
    if head == 'leaf':
        if len(expr.items) != 4:
            raise DslSyntaxError("leaf takes a qubit index and two amplitudes", expr.line, expr.column)
        qubit = _parse_int(expr.items[1])
        if qubit < 1:
            raise DslSyntaxError("qubit indices start at 1", expr.items[1].line, expr.items[1].column)
        return Leaf(qubit, parse_complex(expr.items[2]), parse_complex(expr.items[3]))
    if head == '+':
        if len(expr.items) < 2:
            raise DslSyntaxError("plus gate without children", expr.line, expr.column)
        children = []
        for edge in expr.items[1:]:
            if not isinstance(edge, SList) or len(edge.items) != 2 or _head(edge) in ('leaf', '+', '*'):
                raise DslSyntaxError("plus children are written (COEFFICIENT node)", edge.line, edge.column)
            children.append((parse_complex(edge.items[0]), _to_node(edge.items[1])))
        return Plus(tuple(children))
    if head == '*':
        if len(expr.items) < 2:
            raise DslSyntaxError("tensor gate without children", expr.line, expr.column)
        return Tensor(tuple(_to_node(child) for child in expr.items[1:]))
    raise DslSyntaxError("expected (leaf ...), (+ ...) or (* ...)", expr.line, expr.column)


def parse_tree(text: str, n: Optional[int] = None) -> StateTree:
    """
    Parses the tree DSL. Structural consistency is left to validate().

    :param n: qubit count; defaults to the largest leaf index
    :return: StateTree
    """
    root = _to_node(read_expression(text))
    if n is None:
        n = max(leaf_qubits(root))
    return StateTree(root, n)


def leaf_qubits(node: TreeNode) -> Iterator[int]:
    stack = [node]
    while stack:
        current = stack.pop()
        if isinstance(current, Leaf):
            yield current.qubit
        else:
            stack.extend(current.child_nodes())


def _node_lines(node: TreeNode, indent: int) -> List[str]:
    pad = '  ' * indent
    if isinstance(node, Leaf):
        return [f"{pad}(leaf {node.qubit} {format_complex(node.alpha)} {format_complex(node.beta)})"]
    if isinstance(node, Tensor):
        if all(isinstance(child, Leaf) for child in node.children):
            inner = ' '.join(_node_lines(child, 0)[0] for child in node.children)
            return [f"{pad}(* {inner})"]
        lines = [f"{pad}(*"]
        for child in node.children:
            lines.extend(_node_lines(child, indent + 1))
        lines[-1] += ')'
        return lines
    lines = [f"{pad}(+"]
    for coefficient, child in node.children:
        child_lines = _node_lines(child, indent + 2)
        lines.append(f"{pad}  ({format_complex(coefficient)}")
        lines.extend(child_lines)
        lines[-1] += ')'
    lines[-1] += ')'
    return lines


def serialize_tree(tree: StateTree) -> str:
    """Indented DSL text ending in a newline; parse_tree inverts it exactly."""
    return '\n'.join(_node_lines(tree.root, 0)) + '\n'


# ========================================================================
# =============================== formulas ===============================
# ========================================================================
def _to_formula(expr: Expr) -> Formula:
    head = _head(expr)
    if head in ('+', '*'):
        if len(expr.items) != 3:
            raise DslSyntaxError(f"'{head}' takes exactly two operands", expr.line, expr.column)
        left, right = _to_formula(expr.items[1]), _to_formula(expr.items[2])
        return Add(left, right) if head == '+' else Mul(left, right)
    if head == 'var':
        if len(expr.items) != 2:
            raise DslSyntaxError("var takes one index", expr.line, expr.column)
        index = _parse_int(expr.items[1])
        if index < 1:
            raise DslSyntaxError("variable indices start at 1", expr.items[1].line, expr.items[1].column)
        return Var(index)
    if head == 'const':
        if len(expr.items) != 2:
            raise DslSyntaxError("const takes one number", expr.line, expr.column)
        return Const(parse_complex(expr.items[1]))
    raise DslSyntaxError("expected (+ f g), (* f g), (var i) or (const c)", expr.line, expr.column)


def parse_formula(text: str) -> Formula:
    return _to_formula(read_expression(text))


def serialize_formula(f: Formula) -> str:
    """Single-line DSL text ending in a newline."""
    parts: List[str] = []
    stack: List[Union[Formula, str]] = [f]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Const):
            parts.append(f"(const {format_complex(item.value)})")
        elif isinstance(item, Var):
            parts.append(f"(var {item.index})")
        else:
            parts.append('(+ ' if isinstance(item, Add) else '(* ')
            stack.extend([')', item.right, ' ', item.left])
    return ''.join(parts) + '\n'


def is_formula_text(text: str) -> bool:
    """True if the first gate of the text belongs to the formula grammar."""
    expr = read_expression(text)
    while isinstance(expr, SList) and _head(expr) in ('+', '*'):
        if len(expr.items) < 2:
            return False
        expr = expr.items[1]
    return _head(expr) in ('var', 'const')
