# -*- coding: utf-8 -*-
"""
Tests for partitions, exact and approximate matrix rank and the randomized rank experiments.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from pytreestates import rank_harness as rh
from pytreestates.builders import build_bell_pairs, build_cat
from pytreestates.errors import ConvergenceError, DimensionMismatchError, OversizeError, ParameterError
from pytreestates.gf2 import BitMatrix, Coset, cat_matrix, invertibility_product, random_bitmatrix
from pytreestates.gf2d import VandermondeParams
from pytreestates.rank_harness import Partition, Restriction
from pytreestates.state_tree import AmplitudeVector, evaluate
from pytreestates.streams import trial_rng


@pytest.fixture(scope='module')
def two_bell_pairs():
    return evaluate(build_bell_pairs(4))


class TestPartitions:
    @pytest.mark.parametrize('y_vars, z_vars', [((1, 2), (3,)), ((1, 3), (2, 5)), ((1, 1), (2, 3))])
    def test_invalid_partition(self, y_vars, z_vars):
        with pytest.raises(ParameterError):
            Partition(y_vars, z_vars)

    def test_restriction(self):
        r = Restriction((1,), (3,), {2: 1})
        assert (r.l, r.n) == (1, 3)
        with pytest.raises(ParameterError):
            r.as_partition()
        assert Restriction((2,), (1,)).as_partition() == Partition((2,), (1,))

    @pytest.mark.parametrize('fixed', [{2: 2}, {4: 0}, {}])
    def test_invalid_restriction(self, fixed):
        with pytest.raises(ParameterError):
            Restriction((1,), (3,), fixed)

    def test_random_partition(self):
        p = rh.random_partition(6, seed=1, trial=2)
        assert len(p.y_vars) == 3
        assert sorted(p.y_vars + p.z_vars) == list(range(1, 7))
        assert p == rh.random_partition(6, seed=1, trial=2)
        with pytest.raises(ParameterError):
            rh.random_partition(5)

    def test_random_restriction(self):
        r = rh.random_restriction(8, 2, seed=3)
        assert r.l == 2
        assert len(r.fixed) == 4
        with pytest.raises(ParameterError):
            rh.random_restriction(4, 3)


class TestPartitionMatrix:
    def test_first_variable_is_most_significant(self):
        values = np.arange(16)
        m = rh.partition_matrix(values, Partition((1, 2), (3, 4)))
        assert np.array_equal(m, values.reshape(4, 4))
        assert np.array_equal(rh.partition_matrix(values, Partition((3, 4), (1, 2))), values.reshape(4, 4).T)

    def test_restriction_matrix(self):
        m = rh.restriction_matrix(np.arange(8), Restriction((1,), (3,), {2: 1}))
        assert m.tolist() == [[2, 3], [6, 7]]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            rh.partition_matrix(np.arange(8), Partition((1, 2), (3, 4)))
        with pytest.raises(DimensionMismatchError):
            rh.partition_matrix(np.arange(6), Partition((1,), (2,)))

    def test_is_permutation_matrix(self):
        assert rh.is_permutation_matrix(np.eye(3)[[2, 0, 1]])
        assert not rh.is_permutation_matrix(np.ones((2, 2)))
        assert not rh.is_permutation_matrix(2 * np.eye(2))
        assert not rh.is_permutation_matrix(np.eye(2, 3))


class TestRankExact:
    def test_integers(self):
        assert rh.rank_exact([[1, 2], [2, 4]]) == 1
        sylvester = np.array([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]])
        assert rh.rank_exact(sylvester) == 4

    def test_fractions(self):
        m = np.array([[Fraction(1, 3), Fraction(2, 3)], [Fraction(1, 2), Fraction(1)]], dtype=object)
        assert rh.rank_exact_checked(m) == (1, True)

    def test_dyadic_floats(self):
        m = np.diag([0.5, 0.25, 3.0, 0.125])
        m[3] = m[0] + m[1]
        assert rh.rank_exact_checked(m) == (3, True)

    def test_large_integers_stay_exact(self):
        # entries near 2^40 break float elimination but not the integer one
        big = 2 ** 40
        m = np.array([[big, big + 1], [big + 1, big + 2]], dtype=object)
        assert rh.rank_exact(m) == 2

    def test_fallback_warns(self):
        m = np.array([[1, math.sqrt(2)], [math.sqrt(2), 2]])
        with pytest.warns(RuntimeWarning):
            assert rh.rank_exact_checked(m) == (1, False)

    def test_complex_fallback(self):
        with pytest.warns(RuntimeWarning):
            assert rh.rank_exact(np.array([[1, 1j], [1j, -1]])) == 1

    def test_limits(self):
        assert rh.rank_exact(np.zeros((0, 3))) == 0
        with pytest.raises(DimensionMismatchError):
            rh.rank_exact([1, 2])
        with pytest.raises(OversizeError):
            rh.rank_exact(np.zeros((rh.MAX_EXACT_DIMENSION + 1, 1), dtype=int))


class TestApproximateRank:
    @pytest.mark.parametrize('size', [2, 7, 16])
    def test_jacobi_eigenvalues(self, size, rng):
        a = rng.normal(size=(size, size))
        a = a + a.T
        expected = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert np.allclose(rh.symmetric_eigenvalues(a), expected, atol=1e-9)

    def test_jacobi_known_values(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert np.allclose(rh.symmetric_eigenvalues(a), [3.0, 1.0])

    def test_jacobi_errors(self):
        with pytest.raises(DimensionMismatchError):
            rh.symmetric_eigenvalues(np.zeros((2, 3)))
        with pytest.raises(ConvergenceError):
            rh.symmetric_eigenvalues(np.ones((4, 4)), max_sweeps=0)

    def test_squared_singular_values(self, rng):
        m = rng.normal(size=(5, 8))
        assert np.allclose(rh.squared_singular_values(m), np.linalg.svd(m, compute_uv=False) ** 2, atol=1e-9)

    def test_complex_singular_values(self, rng):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert np.allclose(rh.squared_singular_values(m), np.linalg.svd(m, compute_uv=False) ** 2, atol=1e-8)

    @pytest.mark.parametrize('size', [16, 64, 256])
    @pytest.mark.parametrize('fraction', [0, 0.25, 0.5])
    def test_permutation_matrix(self, size, fraction):
        m = np.eye(size)[trial_rng(5, size).permutation(size)]
        assert rh.rank_eps_lower_bound(m, fraction * size) == math.ceil((1 - fraction) * size)

    def test_diagonal(self):
        m = np.diag([3.0, 2.0, 1.0, 0.5])
        # tail masses: 14.25, 5.25, 1.25, 0.25, 0
        assert rh.rank_eps_lower_bound(m, 1.25) == 2
        assert rh.rank_eps_lower_bound(m, 1.0) == 3
        assert rh.rank_eps_lower_bound(m, 100) == 0

    def test_invalid(self):
        with pytest.raises(ParameterError):
            rh.rank_eps_lower_bound(np.eye(2), -1)
        with pytest.raises(OversizeError):
            rh.rank_eps_lower_bound(np.zeros((rh.MAX_EPS_DIMENSION + 1, 1)), 0)


class TestSubgroup:
    def test_threshold(self):
        assert math.isclose(rh.rank_threshold(16), 2 ** (16 - math.sqrt(2) / 2))

    def test_identity_subgroup(self):
        # S = {00, 11}: y = z
        m = rh.subgroup_matrix(BitMatrix.from_strings(['11']), Partition((1,), (2,)))
        assert m.tolist() == [[1, 0], [0, 1]]

    @pytest.mark.parametrize('trial', range(6))
    def test_closed_form_rank(self, trial):
        rng = trial_rng(21, trial)
        a = random_bitmatrix(3, 6, rng=rng)
        p = rh.random_partition(6, rng=rng)
        assert rh.subgroup_rank(a, p) == rh.rank_exact(rh.subgroup_matrix(a, p))

    def test_experiment(self):
        report = rh.subgroup_rank_experiment(8, 40, seed=3, exact_check=True)
        assert report.permutations_verified == report.both_invertible
        assert report.full_rank >= report.both_invertible
        assert all(rank & (rank - 1) == 0 for rank in report.ranks)
        assert math.isclose(report.expected_both_invertible, invertibility_product(4) ** 2)
        lines = report.format_lines()
        assert lines[0].startswith('n\tk\ttrials\tseed\tboth_invertible_fraction')
        assert lines[1].split('\t')[:4] == ['8', '4', '40', '3']

    @pytest.mark.slow
    def test_both_invertible_fraction(self):
        report = rh.subgroup_rank_experiment(16, 2000, seed=11)
        assert abs(report.both_invertible / report.trials - invertibility_product(8) ** 2) <= 0.03
        assert report.permutations_verified == report.both_invertible

    def test_non_square(self):
        report = rh.subgroup_rank_experiment(6, 5, k=2)
        assert report.expected_both_invertible is None
        assert report.both_invertible == 0
        assert '\tna\t' in report.format_lines()[1]

    def test_invalid(self):
        with pytest.raises(OversizeError):
            rh.subgroup_rank_experiment(7, 1)
        with pytest.raises(ParameterError):
            rh.subgroup_rank_experiment(6, 1, k=0)


class TestVandermondeExperiment:
    def test_full_rank_fraction(self):
        params = VandermondeParams(6, 2, 3, 8)
        report = rh.vandermonde_rank_experiment(params, 60, seed=2)
        assert report.fraction >= 2 / 3
        assert report.pair_trials == 60
        assert report.pair_fraction <= report.fraction
        assert math.isclose(report.bound, rh.full_rank_bound(6, 2, 3, 8))
        assert report.format_lines()[1].startswith('6\t2\t3\t8\t60\t2\t')

    @pytest.mark.slow
    def test_full_rank_fraction_gf16(self):
        report = rh.vandermonde_rank_experiment(VandermondeParams(15, 3, 4, 8), 2000, seed=5)
        assert report.fraction >= 2 / 3

    def test_no_pairs(self):
        report = rh.vandermonde_rank_experiment(VandermondeParams(3, 1, 2, 5), 5)
        assert report.pair_fraction is None
        assert report.format_lines()[1].endswith('na')

    def test_too_many_rows(self):
        with pytest.raises(ParameterError):
            rh.vandermonde_rank_experiment(VandermondeParams(3, 1, 2, 11), 1)


class TestErasure:
    def test_coset_table(self):
        table = rh.coset_table(Coset.checked(cat_matrix(3)))
        assert list(np.flatnonzero(table)) == [0, 7]

    def test_report(self):
        coset = Coset.checked(random_bitmatrix(4, 8, seed=2, trial=50))
        report = rh.erasure_recoverability_check(coset, 2, 10, seed=2)
        assert len(report.ranks) == 10
        assert all(0 <= rank <= 4 for rank in report.ranks)
        assert all(a <= b <= 4 for a, b in zip(report.ambiguous_rows, report.nonzero_rows))
        lines = report.format_lines()
        assert lines[0].startswith('n\tl\ttrials\tseed\tthreshold')
        assert lines[2] == 'rank\tcount'
        assert sum(int(line.split('\t')[1]) for line in lines[3:]) == 10

    def test_limits(self):
        with pytest.raises(OversizeError):
            rh.erasure_recoverability_check(Coset.checked(cat_matrix(18)), rh.MAX_ERASURE_L + 1, 1)


class TestSchmidtRank:
    @pytest.mark.parametrize('vector, chi', [
        (AmplitudeVector.basis_state('0110'), 1),
        (AmplitudeVector(2, [math.sqrt(0.5), 0, 0, math.sqrt(0.5)]), 2),
    ], ids=['product', 'bell'])
    def test_chi(self, vector, chi):
        assert rh.chi_max(vector) == chi

    def test_two_bell_pairs(self, two_bell_pairs):
        assert rh.schmidt_rank(two_bell_pairs, (1, 2)) == 1
        report = rh.chi_report(two_bell_pairs)
        assert report.chi == 4
        assert report.best == (1, 3)
        assert report.format_lines()[1] == '4\texhaustive\t7\t4\t1,3'

    def test_sampled(self, two_bell_pairs):
        report = rh.chi_report(two_bell_pairs, 'sampled', samples=30, seed=1)
        assert report.bipartitions == 30
        assert 1 <= report.chi <= 4
        assert rh.chi_max(evaluate(build_cat(5)), 'sampled', samples=20) == 2

    def test_single_qubit(self):
        assert rh.chi_max(AmplitudeVector.basis_state('1')) == 1

    def test_invalid(self):
        with pytest.raises(ParameterError):
            rh.chi_report(AmplitudeVector.basis_state('00'), 'random')
        with pytest.raises(OversizeError):
            rh.chi_report(AmplitudeVector.basis_state('0' * 13))


class TestSubsetSums:
    @pytest.mark.parametrize('p, expected', [(2, True), (11, True), (1, False), (9, False), (91, False)])
    def test_is_prime(self, p, expected):
        assert rh.is_prime(p) is expected

    def test_powers_of_two(self):
        assert list(np.flatnonzero(rh.subset_sum_residues([1, 2, 4], 11))) == list(range(8))

    @pytest.mark.parametrize('p', [5, 7, 11, 13])
    def test_matches_naive(self, p, rng):
        elements = [int(e) for e in rng.integers(0, 50, size=7)]
        assert np.array_equal(rh.subset_sum_residues(elements, p), rh.subset_sum_residues_naive(elements, p))

    def test_report(self):
        report = rh.subset_sum_coverage(10, 4, 11, 0.2, 5, seed=1)
        assert len(report.coverage) == 5
        assert all(1 <= value <= 11 for value in report.coverage)
        assert math.isclose(report.target, 6.6)
        lines = report.format_lines()
        assert lines[0].startswith('n\tm\tp\tgamma')
        assert lines[2] == 'coverage\tcount'

    @pytest.mark.parametrize('n, m, p, error', [
        (10, 4, 9, ParameterError),
        (30, 25, 11, OversizeError),
        (3, 4, 11, ParameterError),
    ])
    def test_invalid(self, n, m, p, error):
        with pytest.raises(error):
            rh.subset_sum_coverage(n, m, p, 0.1, 1)
