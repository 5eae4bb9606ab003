# -*- coding: utf-8 -*-
"""
Tests for the s-expression reader and the tree / formula text formats.
"""
import numpy as np
import pytest

from pytreestates import dsl, settings
from pytreestates.builders import build_hamming
from pytreestates.errors import DslSyntaxError
from pytreestates.formula import Add, Const, Mul, Var, formula_table
from pytreestates.state_tree import Leaf, Plus, Tensor, evaluate


class TestComplex:
    @pytest.mark.parametrize('text, value', [
        ('0.5', 0.5),
        ('-1', -1),
        ('.25e1', 2.5),
        ('0.5-0.5i', 0.5 - 0.5j),
        ('-1+2e-3i', -1 + 0.002j),
    ])
    def test_parse(self, text, value):
        assert dsl.parse_complex(dsl.Atom(text, 1, 1)) == value

    @pytest.mark.parametrize('text', ['i', '1+i', 'abc', '1e', '0.5 +1i'])
    def test_malformed(self, text):
        with pytest.raises(DslSyntaxError):
            dsl.parse_complex(dsl.Atom(text, 1, 1))

    @pytest.mark.parametrize('value', [0.1, -0.0, 1 / 3 - 2j, 1e-300j, 0.7071067811865476])
    def test_format_is_exact(self, value):
        assert dsl.parse_complex(dsl.Atom(dsl.format_complex(value), 1, 1)) == value

    def test_format_negative_zero(self):
        assert dsl.format_complex(-0.0) == '0.0'


class TestReader:
    def test_comments_and_positions(self):
        expr = dsl.read_expression("; header\n  (a (b c))")
        assert isinstance(expr, dsl.SList)
        assert (expr.line, expr.column) == (2, 3)
        assert expr.items[1].items[1].text == 'c'

    def test_unclosed(self):
        with pytest.raises(DslSyntaxError) as info:
            dsl.read_expression("(a\n (b)")
        assert (info.value.line, info.value.column) == (1, 1)

    def test_unbalanced(self):
        with pytest.raises(DslSyntaxError):
            dsl.read_expression(")")

    def test_trailing(self):
        with pytest.raises(DslSyntaxError):
            dsl.read_expression("(a) b")

    def test_empty(self):
        with pytest.raises(DslSyntaxError):
            dsl.read_expression("  ; nothing\n")


class TestTrees:
    def test_parse_leaf(self):
        tree = dsl.parse_tree("(leaf 1 0.6 0+0.8i)")
        assert tree.root == Leaf(1, 0.6, 0.8j)
        assert tree.n == 1

    def test_parse_figure2(self, figure2_tree):
        assert isinstance(figure2_tree.root, Plus)
        assert figure2_tree.n == 2
        assert all(isinstance(child, Tensor) for child in figure2_tree.root.child_nodes())

    def test_explicit_n(self):
        assert dsl.parse_tree("(leaf 2 1 0)", n=3).n == 3

    @pytest.mark.parametrize('text', [
        '(leaf 0 1 0)',
        '(leaf 1 1)',
        '(+ (leaf 1 1 0))',
        '(+)',
        '(*)',
        '(foo 1)',
        '(+ (0.5 (leaf 1 1 0) extra))',
    ])
    def test_syntax_errors(self, text):
        with pytest.raises(DslSyntaxError):
            dsl.parse_tree(text)

    def test_serialize_roundtrip(self, knill_tree):
        text = dsl.serialize_tree(knill_tree)
        again = dsl.parse_tree(text)
        assert dsl.serialize_tree(again) == text
        assert np.allclose(evaluate(again).amps, evaluate(knill_tree).amps)

    def test_serialize_layout(self):
        text = dsl.serialize_tree(build_hamming(2, 1))
        assert text.endswith('\n')
        assert text.splitlines()[0] == '(+'
        assert '(* (leaf 1 1.0 0.0) (leaf 2 0.0 1.0))' in text

    def test_knill_fixture_matches_builder(self, knill_tree):
        text = settings.resolve_path('knill.tree').read_text(encoding='utf-8')
        fixture = dsl.parse_tree(text)
        assert fixture.size == 40
        assert np.allclose(evaluate(fixture).amps, evaluate(knill_tree).amps)


class TestFormulas:
    def test_parse(self):
        f = dsl.parse_formula("(+ (* (const 2) (var 1)) (var 2))")
        assert f == Add(Mul(Const(2), Var(1)), Var(2))
        assert np.allclose(formula_table(f, 2), [0, 1, 2, 3])

    @pytest.mark.parametrize('text', ['(+ (var 1))', '(var 0)', '(var)', '(const)', '(leaf 1 1 0)'])
    def test_syntax_errors(self, text):
        with pytest.raises(DslSyntaxError):
            dsl.parse_formula(text)

    def test_serialize(self):
        f = Add(Var(1), Mul(Const(-0.5j), Var(3)))
        text = dsl.serialize_formula(f)
        assert text == '(+ (var 1) (* (const 0.0-0.5i) (var 3)))\n'
        assert dsl.parse_formula(text) == f

    def test_is_formula_text(self, figure2_tree):
        assert dsl.is_formula_text("(* (+ (var 1) (const 1)) (var 2))")
        assert not dsl.is_formula_text(dsl.serialize_tree(figure2_tree))
        assert not dsl.is_formula_text("(leaf 1 1 0)")
