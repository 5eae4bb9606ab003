# -*- coding: utf-8 -*-
"""
Defaults shared by all modules and the run configuration of the command line tool.

Library functions take these values as keyword defaults; the CLI overrides them
per call from a RunConfig.
"""
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

MAX_QUBITS = 20  # dense evaluation cap
TOLERANCE = 1e-9  # every real-valued comparison
COSET_CAP = 2 ** 20  # largest coset enumerated explicitly
MOTS_MAX_COLUMNS = 22  # 3^n submask budget of the MOTS solver
BRUTEFORCE_MAX_QUBITS = 4
BRUTEFORCE_MAX_SET = 16
SIMULATOR_MAX_QUBITS = 20  # data + ancilla
CONVENTION = 'classical'
CONVENTIONS = ('classical', 'free')

FIXTURES_ENV = 'PYTREESTATES_FIXTURES'
_PACKAGED_FIXTURES = Path(__file__).parent / 'fixtures'


def fixture_dir() -> Path:
    """
    Directory used to resolve fixture names. PYTREESTATES_FIXTURES overrides the packaged one.
    """
    override = os.environ.get(FIXTURES_ENV)
    return Path(override) if override else _PACKAGED_FIXTURES


def resolve_path(name: str) -> Path:
    """
    Returns name as given if it exists, otherwise looks it up in the fixture directory.

    :param name: file path or bare fixture name (e.g. 'figure2.tree')
    :return: Path
    """
    path = Path(name)
    if path.exists():
        return path
    candidate = fixture_dir() / path.name
    return candidate if candidate.exists() else path


@dataclass
class RunConfig:
    """
    Everything one CLI invocation depends on. Identical RunConfigs give byte-identical output.
    """
    subcommand: str = ''
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    seed: int = 0
    trials: int = 100
    max_qubits: int = MAX_QUBITS
    convention: str = CONVENTION
    tolerance: float = TOLERANCE
    verbose: bool = False

    def __post_init__(self):
        assert self.convention in CONVENTIONS, f"unknown leaf convention '{self.convention}'"
        assert 0 <= self.seed < 2 ** 64, "seed must fit into 64 bits"
