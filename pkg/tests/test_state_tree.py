# -*- coding: utf-8 -*-
"""
Tests for pytreestates.state_tree: evaluation, validation, classification and transforms.
"""
import math

import numpy as np
import pytest

from pytreestates import state_tree as st
from pytreestates.builders import build_cat, build_parity_fourier
from pytreestates.errors import (DimensionMismatchError, InvalidTreeError, NotUnitaryError,
                                 OversizeError, ParameterError)
from pytreestates.state_tree import (HADAMARD, SQRT_HALF, AmplitudeVector, Leaf, Plus, StateTree, Tensor,
                                     TreeClass)


class TestMasks:
    def test_qubit_mask(self):
        assert st.qubit_mask([1, 3]) == 0b101
        assert st.qubit_mask([]) == 0

    def test_mask_qubits(self):
        assert st.mask_qubits(0b1101) == (1, 3, 4)
        assert st.mask_qubits(0) == ()

    def test_bitstring(self):
        assert st.bitstring(5, 4) == '0101'
        assert st.bitstring(0, 0) == ''


class TestAmplitudeVector:
    def test_wrong_length(self):
        with pytest.raises(DimensionMismatchError):
            AmplitudeVector(2, np.ones(3))

    def test_basis_state_index_order(self):
        v = AmplitudeVector.basis_state('10')
        assert v.amps[2] == 1
        assert v.amplitude('10') == 1

    def test_uniform(self):
        v = AmplitudeVector.uniform(2, [0, 3])
        assert math.isclose(abs(v.amps[3]), SQRT_HALF)
        assert v.is_normalized()

    def test_uniform_empty(self):
        with pytest.raises(ParameterError):
            AmplitudeVector.uniform(2, [])

    def test_format_lines(self):
        v = AmplitudeVector(1, [SQRT_HALF, -1j * SQRT_HALF])
        assert v.format_lines() == ['0 0.707106781186548 0', '1 0 -0.707106781186548']

    def test_format_lines_drop_zeros(self):
        v = AmplitudeVector.basis_state('01')
        assert v.format_lines(drop_zeros=True) == ['01 1 0']

    def test_parse_lines_fills_missing(self):
        v = AmplitudeVector.parse_lines("; comment\n11 1 0\n")
        assert v.n == 2
        assert np.allclose(v.amps, [0, 0, 0, 1])

    def test_parse_lines_inconsistent_width(self):
        with pytest.raises(DimensionMismatchError):
            AmplitudeVector.parse_lines("00 1 0\n1 0 0\n")

    def test_parse_lines_malformed(self):
        with pytest.raises(ParameterError):
            AmplitudeVector.parse_lines("0a 1 0\n")

    def test_normalized_zero(self):
        with pytest.raises(ParameterError):
            AmplitudeVector(1, [0, 0]).normalized()

    def test_fidelity_and_distance(self):
        a = AmplitudeVector.basis_state('0')
        b = AmplitudeVector(1, [SQRT_HALF, SQRT_HALF])
        assert math.isclose(st.fidelity(a, b), 0.5)
        assert math.isclose(st.l2_distance2(a, a), 0)

    def test_inner_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            st.inner(AmplitudeVector.basis_state('0'), AmplitudeVector.basis_state('00'))

    @pytest.mark.parametrize('eps, delta', [(0, 0), (1, 2), (0.75, 1)])
    def test_eps_to_delta(self, eps, delta):
        assert math.isclose(st.eps_to_delta(eps), delta, abs_tol=1e-12)

    def test_eps_out_of_range(self):
        with pytest.raises(ParameterError):
            st.eps_to_delta(1.5)


class TestEvaluate:
    def test_figure2(self, figure2_tree):
        v = st.evaluate(figure2_tree)
        assert np.allclose(v.amps, [0.5, 0.5, 0.5, -0.5])
        assert v.format_lines()[-1] == '11 -0.5 0'

    def test_knill(self, knill_tree):
        v = st.evaluate(knill_tree)
        assert knill_tree.size == 40
        assert v.n == 5
        assert np.count_nonzero(np.abs(v.amps) > 1e-9) == 16
        assert np.allclose(np.abs(v.amps[np.abs(v.amps) > 1e-9]), 0.25)

    def test_tensor_reorders_qubits(self):
        tree = StateTree(Tensor((Leaf.bit(2, 1), Leaf.bit(1, 0))), 2)
        assert np.allclose(st.evaluate(tree).amps, [0, 1, 0, 0])

    def test_oversize(self):
        tree = build_cat(4)
        with pytest.raises(OversizeError):
            st.evaluate(tree, max_qubits=3)

    def test_overlapping_tensor(self):
        tree = StateTree(Tensor((Leaf.bit(1, 0), Leaf.bit(1, 1))), 1)
        with pytest.raises(InvalidTreeError):
            st.evaluate(tree)

    def test_size_and_depth(self, cat3):
        assert cat3.size == 6
        assert cat3.depth == 2
        assert st.tree_size(cat3) == 6
        assert st.depth(cat3) == 2

    def test_shared_subtree_counts_twice(self):
        leaf = Leaf.plus(2)
        root = Plus(((SQRT_HALF, Tensor((Leaf.bit(1, 0), leaf))), (SQRT_HALF, Tensor((Leaf.bit(1, 1), leaf)))))
        assert StateTree(root, 2).size == 4


class TestValidate:
    def test_valid(self, figure2_tree, knill_tree):
        assert st.validate(figure2_tree) == []
        assert st.validate(knill_tree) == []

    def test_not_normalized(self):
        tree = StateTree(Leaf(1, 1, 1), 1)
        violations = st.validate(tree)
        assert [v.rule for v in violations] == ['vertex-not-normalized']
        assert math.isclose(violations[0].value, math.sqrt(2))

    def test_root_mismatch(self):
        tree = StateTree(Leaf.bit(1, 0), 2)
        assert 'root-qubitset-mismatch' in [v.rule for v in st.validate(tree)]

    def test_leaf_out_of_range(self):
        tree = StateTree(Tensor((Leaf.bit(1, 0), Leaf.bit(3, 0))), 2)
        rules = [v.rule for v in st.validate(tree)]
        assert 'leaf-qubit-out-of-range' in rules

    def test_plus_mismatch(self):
        tree = StateTree(Plus(((SQRT_HALF, Leaf.bit(1, 0)), (SQRT_HALF, Leaf.bit(2, 0)))), 2)
        violations = st.validate(tree)
        assert any(v.rule == 'plus-children-qubitset-mismatch' and v.path == (1,) for v in violations)

    def test_overlap(self):
        tree = StateTree(Tensor((Leaf.bit(1, 0), Leaf.bit(1, 1))), 1)
        assert [v.rule for v in st.validate(tree)] == ['tensor-children-overlap']

    def test_violation_format(self):
        assert st.Violation((0, 1), 'empty-gate').format() == '0.1\tempty-gate'
        assert st.Violation((), 'oversize', 30.0).format() == 'root\toversize\t30'

    def test_oversize_reported(self):
        assert [v.rule for v in st.validate(build_cat(5), max_qubits=4)] == ['oversize']


class TestClassify:
    def test_cat_manifestly_orthogonal(self, cat3):
        assert st.classify_tree(cat3) is TreeClass.MANIFESTLY_ORTHOGONAL

    def test_parity_fourier_orthogonal(self):
        assert st.classify_tree(build_parity_fourier(3, 0)) is TreeClass.ORTHOGONAL

    def test_knill_orthogonal(self, knill_tree):
        assert st.classify_tree(knill_tree) is TreeClass.ORTHOGONAL

    def test_general(self):
        root = Plus(((1 / math.sqrt(2 + math.sqrt(2)), Leaf.bit(1, 0)),
                     (1 / math.sqrt(2 + math.sqrt(2)), Leaf.plus(1))))
        assert st.classify_tree(StateTree(root, 1)) is TreeClass.GENERAL

    def test_labels(self):
        assert TreeClass.MANIFESTLY_ORTHOGONAL.label == 'manifestly-orthogonal'
        assert TreeClass.from_label('orthogonal') is TreeClass.ORTHOGONAL
        assert TreeClass.GENERAL < TreeClass.ORTHOGONAL


class TestRestrict:
    def test_restrict_cat(self, cat3):
        restricted = st.restrict(cat3, {1: 1})
        assert restricted.kept_qubits == (2, 3)
        assert np.allclose(restricted.vector(), [0, 0, 0, SQRT_HALF])

    def test_restrict_all(self, figure2_tree):
        restricted = st.restrict(figure2_tree, {1: 1, 2: 1})
        assert restricted.tree is None
        assert np.allclose(restricted.vector(), [-0.5])

    def test_restrict_matches_slice(self, knill_tree):
        full = st.evaluate(knill_tree).as_tensor()
        restricted = st.restrict(knill_tree, {2: 0, 4: 1})
        assert np.allclose(restricted.vector(), full[:, 0, :, 1, :].reshape(-1))

    def test_oversize_checked_before_evaluation(self, cat3, monkeypatch):
        restricted = st.restrict(cat3, {1: 1})

        def fail(*args):
            raise AssertionError("evaluated an oversize tree")

        monkeypatch.setattr(st, '_node_tensor', fail)
        with pytest.raises(OversizeError):
            restricted.vector(max_qubits=1)

    def test_invalid_assignment(self, cat3):
        with pytest.raises(ParameterError):
            st.restrict(cat3, {4: 0})


class TestNormalize:
    def test_drops_zero_branch(self):
        node = Plus(((2, Leaf.bit(1, 0)), (0, Leaf.bit(1, 1))))
        norm, normalized = st.normalize_node(node)
        assert math.isclose(norm, 2)
        assert len(normalized.children) == 1

    def test_zero_state(self):
        node = Plus(((1, Leaf.bit(1, 0)), (-1, Leaf.bit(1, 0))))
        assert st.normalize_node(node) == (0.0, None)


class TestUnitaries:
    def test_check_unitary(self):
        with pytest.raises(NotUnitaryError):
            st.check_unitary([[1, 1], [0, 1]])
        with pytest.raises(DimensionMismatchError):
            st.check_unitary(np.ones((2, 3)))

    @pytest.mark.parametrize('qubits', [[1], [3], [2, 3], [3, 1]], ids=['q1', 'q3', 'q23', 'q31'])
    def test_apply_local_unitary_matches_dense(self, knill_tree, qubits):
        k = len(qubits)
        unitary = np.linalg.qr(np.arange(4 ** k).reshape(2 ** k, 2 ** k) + 1j * np.eye(2 ** k))[0]
        result = st.apply_local_unitary(knill_tree, unitary, qubits)
        expected = st.apply_dense_unitary(st.evaluate(knill_tree), unitary, qubits)
        assert np.allclose(st.evaluate(result).amps, expected.amps)
        assert result.size <= k * 4 ** k * knill_tree.size

    def test_apply_local_unitary_bad_qubits(self, cat3):
        with pytest.raises(ParameterError):
            st.apply_local_unitary(cat3, np.eye(4), [1, 1])

    def test_local_basis_change(self, cat3):
        result = st.local_basis_change(cat3, [HADAMARD] * 3)
        expected = st.evaluate(cat3)
        for q in (1, 2, 3):
            expected = st.apply_dense_unitary(expected, HADAMARD, [q])
        assert np.allclose(st.evaluate(result).amps, expected.amps)
        assert result.size == cat3.size

    def test_local_basis_change_not_2x2(self, cat3):
        with pytest.raises(DimensionMismatchError):
            st.local_basis_change(cat3, {1: np.eye(4)})
