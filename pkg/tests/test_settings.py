# -*- coding: utf-8 -*-
"""
Tests for fixture lookup, the run configuration and the random streams.
"""
import numpy as np
import pytest

from pytreestates import settings
from pytreestates.settings import RunConfig
from pytreestates.streams import random_bits, trial_rng


class TestFixtures:
    def test_packaged(self):
        assert settings.resolve_path('knill.tree').exists()

    def test_existing_path_wins(self, tmp_path):
        path = tmp_path / 'figure2.tree'
        path.write_text('(leaf 1 1 0)\n')
        assert settings.resolve_path(str(path)) == path

    def test_override(self, tmp_path, monkeypatch):
        (tmp_path / 'own.mat').write_text('1 2\n11\n')
        monkeypatch.setenv(settings.FIXTURES_ENV, str(tmp_path))
        assert settings.fixture_dir() == tmp_path
        assert settings.resolve_path('own.mat') == tmp_path / 'own.mat'

    def test_missing(self):
        assert not settings.resolve_path('missing.tree').exists()


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig()
        assert (config.seed, config.convention, config.tolerance) == (0, 'classical', settings.TOLERANCE)

    @pytest.mark.parametrize('kwargs', [{'convention': 'quantum'}, {'seed': -1}, {'seed': 2 ** 64}])
    def test_invalid(self, kwargs):
        with pytest.raises(AssertionError):
            RunConfig(**kwargs)


class TestStreams:
    def test_reproducible(self):
        assert np.array_equal(trial_rng(7, 3).integers(0, 100, 10), trial_rng(7, 3).integers(0, 100, 10))

    def test_trials_differ(self):
        assert not np.array_equal(trial_rng(7, 3).integers(0, 2 ** 32, 4), trial_rng(7, 4).integers(0, 2 ** 32, 4))
        assert not np.array_equal(trial_rng(7, 3).integers(0, 2 ** 32, 4), trial_rng(8, 3).integers(0, 2 ** 32, 4))

    def test_large_seed(self):
        trial_rng(2 ** 64 - 1, 10 ** 6).random()

    def test_random_bits(self, rng):
        bits = random_bits(rng, (3, 5))
        assert bits.dtype == np.uint8
        assert bits.shape == (3, 5)
        assert set(np.unique(bits)) <= {0, 1}
