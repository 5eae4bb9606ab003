# -*- coding: utf-8 -*-
"""
Tests for the state-preparation compiler, the dense simulator and the circuit text format.
"""
import math

import numpy as np
import pytest

from pytreestates import circuit as cc
from pytreestates.builders import (build_cluster1d, build_coset_fourier_otree, build_divisibility_tree,
                                   build_hamming, build_parity, build_parity_fourier)
from pytreestates.circuit import Circuit, ControlledSub, OrNot, Prep, Unitary
from pytreestates.errors import (DimensionMismatchError, InvalidTreeError, NotOrthogonalError,
                                 NotUnitaryError, OversizeError, ParameterError, PrepOnNonzeroError)
from pytreestates.gf2 import Coset, random_bitmatrix
from pytreestates.state_tree import HADAMARD, SQRT_HALF, AmplitudeVector, Leaf, StateTree, fidelity


def zero_state(width):
    return AmplitudeVector.basis_state('0' * width)


@pytest.fixture(scope='module', params=['figure2', 'knill', 'parity', 'parity-fourier', 'hamming', 'coset'])
def orthogonal_tree(request, figure2_tree, knill_tree):
    if request.param == 'figure2':
        return figure2_tree
    if request.param == 'knill':
        return knill_tree
    if request.param == 'parity':
        return build_parity(4, 1)
    if request.param == 'parity-fourier':
        return build_parity_fourier(3, 0)
    if request.param == 'hamming':
        return build_hamming(5, 2)
    a = random_bitmatrix(2, 5, seed=1, trial=3)
    return build_coset_fourier_otree(Coset.checked(a, a.matvec([1, 0, 0, 1, 1])))


class TestGates:
    def test_prep_matrix(self):
        gate = Prep(1, 0.6, 0.8j)
        matrix = gate.matrix()
        assert np.allclose(matrix[:, 0], [0.6, 0.8j])
        assert np.allclose(matrix.conj().T @ matrix, np.eye(2))

    def test_unitary_checks(self):
        with pytest.raises(NotUnitaryError):
            Unitary((1,), [[1, 1], [0, 1]])
        with pytest.raises(DimensionMismatchError):
            Unitary((1, 2), np.eye(2))
        with pytest.raises(ParameterError):
            Unitary((1, 2, 3, 4), np.eye(16))

    def test_wire_range(self):
        with pytest.raises(ParameterError):
            Circuit(2, 0, [Prep(3, 1, 0)])

    def test_counts(self):
        body = Circuit(2, 1, [Prep(1, 0, 1), ControlledSub(2, 0, Circuit(2, 1, [Prep(3, 0, 1)]))])
        c = Circuit(2, 1, [Prep(2, SQRT_HALF, SQRT_HALF), ControlledSub(2, 1, body)])
        assert c.gate_count() == 5
        assert c.nesting_depth() == 2
        assert c.width == 3

    def test_then_dimension(self):
        with pytest.raises(DimensionMismatchError):
            Circuit(2, 0).then(Circuit(2, 1))


class TestSimulator:
    def test_prep(self):
        out = cc.simulate(Circuit(2, 0, [Prep(2, SQRT_HALF, -SQRT_HALF)]))
        assert np.allclose(out.amps, [SQRT_HALF, -SQRT_HALF, 0, 0])

    def test_prep_on_nonzero(self):
        with pytest.raises(PrepOnNonzeroError):
            cc.simulate(Circuit(1, 0, [Prep(1, 0, 1), Prep(1, 0, 1)]))

    def test_unitary_qubit_order(self):
        cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        out = cc.simulate(Circuit(2, 0, [Prep(2, 0, 1), Unitary((2, 1), cnot)]))
        assert out.amplitude('11') == 1

    @pytest.mark.parametrize('prepared, expected', [
        ([], '000'),
        ([Prep(2, 0, 1)], '110'),
        ([Prep(3, 0, 1)], '101'),
        ([Prep(2, 0, 1), Prep(3, 0, 1)], '111'),
    ], ids=['all-zero', 'first', 'second', 'both'])
    def test_or_not(self, prepared, expected):
        out = cc.simulate(Circuit(3, 0, prepared + [OrNot(1, (2, 3))]))
        assert out.amplitude(expected) == 1

    def test_or_not_superposition(self):
        out = cc.simulate(Circuit(2, 0, [Prep(2, SQRT_HALF, SQRT_HALF), OrNot(1, (2,))]))
        assert np.allclose(out.amps, [SQRT_HALF, 0, 0, SQRT_HALF])

    def test_controlled(self):
        body = Circuit(2, 0, [Prep(2, 0, 1)])
        out = cc.simulate(Circuit(2, 0, [Prep(1, SQRT_HALF, SQRT_HALF), ControlledSub(1, 1, body)]))
        assert np.allclose(out.amps, [SQRT_HALF, 0, 0, SQRT_HALF])
        out = cc.simulate(Circuit(2, 0, [Prep(1, SQRT_HALF, SQRT_HALF), ControlledSub(1, 0, body)]))
        assert np.allclose(out.amps, [0, SQRT_HALF, SQRT_HALF, 0])

    def test_oversize(self):
        with pytest.raises(OversizeError):
            cc.simulate(Circuit(4, 2), max_qubits=5)


class TestCompile:
    def test_leaf(self):
        c = cc.compile_tree(StateTree(Leaf(1, 0.6, 0.8), 1))
        assert c.n_ancilla == 0
        assert c.gates == (Prep(1, 0.6, 0.8),)

    def test_prepares_state(self, orthogonal_tree):
        report = cc.verify_prepare(orthogonal_tree)
        assert report.fidelity >= 1 - 1e-9
        assert report.size == orthogonal_tree.size
        assert report.ancillas == cc.compile_tree(orthogonal_tree).n_ancilla

    def test_ancillas_return_to_zero(self, orthogonal_tree):
        c = cc.compile_tree(orthogonal_tree)
        out = cc.simulate(c)
        n = orthogonal_tree.n
        tail = out.amps.reshape(2 ** n, 2 ** c.n_ancilla)[:, 1:]
        assert np.allclose(tail, 0)

    def test_inverse_returns_to_zero(self, orthogonal_tree):
        c = cc.compile_tree(orthogonal_tree)
        out = cc.simulate(c.then(cc.invert(c)))
        assert math.isclose(fidelity(out, zero_state(c.width)), 1, abs_tol=1e-9)

    def test_knill_structure(self, knill_tree):
        c = cc.compile_tree(knill_tree)
        assert c.n_ancilla == 3
        assert c.nesting_depth() >= 2

    def test_phase_only_plus(self):
        tree = StateTree(cc.Plus(((1j, Leaf(1, SQRT_HALF, SQRT_HALF)),)), 1)
        out = cc.simulate(cc.compile_tree(tree))
        assert np.allclose(out.amps, [1j * SQRT_HALF, 1j * SQRT_HALF])

    def test_divisibility_is_general(self):
        with pytest.raises(NotOrthogonalError):
            cc.compile_tree(build_divisibility_tree(4, 3))

    def test_cluster_is_general(self):
        with pytest.raises(NotOrthogonalError):
            cc.compile_tree(build_cluster1d(4))

    def test_invalid_tree(self):
        with pytest.raises(InvalidTreeError):
            cc.compile_tree(StateTree(Leaf(1, 1, 1), 1))

    def test_report_lines(self, figure2_tree):
        report = cc.verify_prepare(figure2_tree)
        lines = report.format_lines()
        assert lines[0] == 'n\tsize\tgates\tancillas\tnesting\tratio\tfidelity'
        fields = lines[1].split('\t')
        assert fields[:2] == ['2', '4']
        assert math.isclose(float(fields[5]), report.gates / 8, rel_tol=1e-5)

    def test_with_ancillas(self):
        v = AmplitudeVector(1, [SQRT_HALF, SQRT_HALF])
        assert cc.with_ancillas(v, 0) is v
        assert np.allclose(cc.with_ancillas(v, 2).amps[[0, 4]], SQRT_HALF)


class TestTextFormat:
    def test_format(self):
        c = Circuit(1, 1, [Prep(2, 0, 1), ControlledSub(2, 1, Circuit(1, 1, [Unitary((1,), HADAMARD)])),
                           OrNot(2, (1,))])
        lines = cc.format_circuit(c).splitlines()
        assert lines[0] == 'qubits 1 1'
        assert lines[1] == 'prep 2 0.0 0.0 1.0 0.0'
        assert lines[2] == 'csub 2 1 {'
        assert lines[3].startswith('  u 1 1 0.7071067811865475 0.0')
        assert lines[4:] == ['}', 'ornot 2 1']

    def test_roundtrip(self, orthogonal_tree):
        c = cc.compile_tree(orthogonal_tree)
        again = cc.parse_circuit(cc.format_circuit(c))
        assert again.gate_count() == c.gate_count()
        assert np.allclose(cc.simulate(again).amps, cc.simulate(c).amps)

    @pytest.mark.parametrize('text', [
        '',
        'qubits 2\n',
        'qubits 1 0\nprep 1 1 0\n',
        'qubits 1 0\n}\n',
        'qubits 2 0\ncsub 1 1 {\nprep 2 0 0 1 0\n',
        'qubits 1 0\nu 1 1 1 0 0 0\n',
        'qubits 1 0\nfoo 1\n',
        'qubits 1 0\nprep 1 a 0 0 0\n',
    ])
    def test_invalid(self, text):
        with pytest.raises(ParameterError):
            cc.parse_circuit(text)
