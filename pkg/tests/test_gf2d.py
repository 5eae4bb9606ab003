# -*- coding: utf-8 -*-
"""
Tests for GF(2^d) arithmetic, the Hadamard code and the binary Vandermonde matrix.
"""
import numpy as np
import pytest

from pytreestates import gf2d
from pytreestates.errors import OversizeError, ParameterError
from pytreestates.gf2 import BitMatrix, rank_gf2
from pytreestates.gf2d import GF2dField, VandermondeParams


@pytest.fixture(scope='module', params=[2, 3, 4, 5], ids=lambda d: f'd={d}')
def field(request):
    return GF2dField.of_degree(request.param)


class TestField:
    @pytest.mark.parametrize('d, poly', [(1, 0b10), (2, 0b111), (3, 0b1011), (4, 0b10011)])
    def test_smallest_irreducible(self, d, poly):
        assert gf2d.smallest_irreducible(d) == poly

    def test_is_irreducible(self):
        assert gf2d.is_irreducible(0b10011)
        assert not gf2d.is_irreducible(0b10101)  # (x^2 + x + 1)^2
        assert not gf2d.is_irreducible(1)

    def test_reducible_modulus(self):
        with pytest.raises(ParameterError):
            GF2dField(4, 0b10101)
        with pytest.raises(ParameterError):
            GF2dField(3, 0b10011)

    def test_degree_range(self):
        with pytest.raises(ParameterError):
            gf2d.smallest_irreducible(gf2d.MAX_DEGREE + 1)

    def test_reduction(self):
        f = GF2dField.of_degree(4)
        assert gf2d.gf2d_mul(f, 0b10, 0b1000) == 0b11

    def test_multiplicative_group(self, field):
        for a in range(1, field.order):
            assert field.power(a, field.order - 1) == 1

    def test_distributive(self, field):
        for a in range(field.order):
            for b in (1, field.order - 1):
                c = 0b11 % field.order
                left = gf2d.gf2d_mul(field, a, b ^ c)
                assert left == gf2d.gf2d_mul(field, a, b) ^ gf2d.gf2d_mul(field, a, c)

    def test_check(self, field):
        with pytest.raises(ParameterError):
            field.check(field.order)

    def test_mult_matrix(self, field):
        for a in range(field.order):
            m = gf2d.mult_matrix(field, a)
            for q in range(field.order):
                product = m.matvec(gf2d.element_bits(field, q))
                assert gf2d.bits_element(product) == gf2d.gf2d_mul(field, a, q)
            assert rank_gf2(m) == (field.d if a else 0)


class TestHadamard:
    @pytest.mark.parametrize('v', [[1, 0, 0], [1, 1, 0], [1, 1, 1]])
    def test_codeword_weight(self, v):
        assert gf2d.hadamard_encode(v).sum() == 4

    def test_zero(self):
        assert not gf2d.hadamard_encode([0, 0]).any()

    def test_block(self):
        m = BitMatrix.from_strings(['10', '11'])
        block = gf2d.hadamard_block(m)
        for q in ([0, 1], [1, 0], [1, 1]):
            assert np.array_equal((block.astype(int) @ q) % 2, gf2d.hadamard_encode(m.matvec(q)))


class TestVandermonde:
    @pytest.mark.parametrize('n, k, d, c', [(16, 3, 4, 0), (4, 4, 4, 0), (3, 1, 1, 0), (3, 1, 4, -1)])
    def test_invalid_params(self, n, k, d, c):
        with pytest.raises(ParameterError):
            VandermondeParams(n, k, d, c)

    def test_shape(self):
        params = VandermondeParams(5, 2, 3)
        matrix = gf2d.build_binary_vandermonde(params)
        assert matrix.shape == (params.rows, params.cols) == (40, 6)
        assert rank_gf2(matrix) == 6

    def test_min_weight(self):
        params = VandermondeParams(15, 3, 4)
        matrix = gf2d.build_binary_vandermonde(params)
        assert params.weight_bound == 96
        assert gf2d.min_image_weight(matrix) >= 96

    def test_block_row_is_codeword_of_evaluation(self):
        params = VandermondeParams(6, 2, 3)
        field = GF2dField.of_degree(3)
        matrix = gf2d.build_binary_vandermonde(params).to_array().astype(int)
        u0, u1 = 0b101, 0b011
        u = np.concatenate([gf2d.element_bits(field, u0), gf2d.element_bits(field, u1)])
        image = (matrix @ u) % 2
        for label in range(1, 7):
            value = u0 ^ gf2d.gf2d_mul(field, u1, label)
            block = image[(label - 1) * 8:label * 8]
            assert np.array_equal(block, gf2d.hadamard_encode(gf2d.element_bits(field, value)))

    def test_min_weight_cap(self):
        matrix = BitMatrix.zeros(2, 21)
        with pytest.raises(OversizeError):
            gf2d.min_image_weight(matrix)
