"""
Shared fixtures: small trees, cosets and seeded generators used across test modules.
"""
import pytest

from pytreestates import settings
from pytreestates.builders import build_cat, build_knill_tree, build_parity
from pytreestates.dsl import parse_tree
from pytreestates.gf2 import Coset, cat_matrix, parity_matrix
from pytreestates.streams import trial_rng


@pytest.fixture(scope='session')
def figure2_tree():
    return parse_tree(settings.resolve_path('figure2.tree').read_text(encoding='utf-8'))


@pytest.fixture(scope='session')
def knill_tree():
    return build_knill_tree()


@pytest.fixture(scope='session')
def cat3():
    return build_cat(3)


@pytest.fixture(scope='session')
def parity4():
    return build_parity(4, 0)


@pytest.fixture(scope='module', params=[2, 3, 4], ids=['n=2', 'n=3', 'n=4'])
def parity_coset(request):
    return Coset.checked(parity_matrix(request.param))


@pytest.fixture(scope='module')
def cat4_coset():
    return Coset.checked(cat_matrix(4))


@pytest.fixture(scope='function')
def rng():
    return trial_rng(1234)
