# -*- coding: utf-8 -*-
"""
Command line tool. The run flags may go before or after the subcommand:

    pytreestates [--seed S] [--trials T] [--max-qubits Q] [--convention C] [--tolerance E] [-v]
                 SUBCOMMAND ... [run flags]

File arguments accept '-' for stdin/stdout and bare fixture names (figure2.tree, parity4.mat, ...)
resolved against the fixture directory. Domain errors exit 1 with "ERROR <code>: <message>"
on stderr; usage errors exit 2.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pytreestates import __version__, settings
from pytreestates.bridge import formula_to_tree, tree_to_formula
from pytreestates.builders import (FAMILIES, build_bell_pairs, build_cat, build_cluster1d, build_coset_fourier_otree,
                                   build_coset_sigma1, build_divisibility_tree, build_hamming, build_knill_tree,
                                   build_parity, build_parity_fourier, build_sigma3_example)
from pytreestates.circuit import compile_tree, format_circuit, parse_circuit, simulate, verify_prepare
from pytreestates.dsl import is_formula_text, parse_formula, parse_tree, serialize_formula, serialize_tree
from pytreestates.errors import InvalidTreeError, ParameterError, TreeStateError
from pytreestates.formula import balance, depth_bound
from pytreestates.gf2 import Coset, format_matrix_text, parse_matrix_text, random_bitmatrix
from pytreestates.gf2d import VandermondeParams, build_binary_vandermonde, min_image_weight
from pytreestates.mots import mots_coset, mots_random_experiment
from pytreestates.rank_harness import (chi_report, erasure_recoverability_check, subgroup_rank_experiment,
                                       subset_sum_coverage, vandermonde_rank_experiment)
from pytreestates.settings import RunConfig
from pytreestates.state_tree import AmplitudeVector, StateTree, classify_tree, evaluate, validate

logger = logging.getLogger(__name__)


# ========================================================================
# ================================== io ==================================
# ========================================================================
def read_text(name: str) -> str:
    if name == '-':
        return sys.stdin.read()
    return settings.resolve_path(name).read_text(encoding='utf-8')


def write_text(name: Optional[str], text: str) -> None:
    if name is None or name == '-':
        sys.stdout.write(text)
    else:
        with open(name, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)


def _lines(lines: List[str]) -> str:
    return '\n'.join(lines) + '\n'


def _read_tree(name: str, n: Optional[int] = None) -> StateTree:
    return parse_tree(read_text(name), n)


def _read_state(name: str, config: RunConfig) -> AmplitudeVector:
    """A tree DSL file is evaluated; anything else is read as amplitude lines."""
    text = read_text(name)
    content = [line.strip() for line in text.splitlines() if line.strip() and not line.lstrip().startswith(';')]
    if content and content[0].startswith('('):
        return evaluate(parse_tree(text), config.max_qubits)
    return AmplitudeVector.parse_lines(text)


def _read_coset(name: str) -> Coset:
    a, b = parse_matrix_text(read_text(name))
    return Coset.checked(a, b)


# ========================================================================
# =============================== commands ===============================
# ========================================================================
def cmd_eval(args, config: RunConfig) -> int:
    vector = evaluate(_read_tree(args.input, args.n), config.max_qubits)
    write_text(args.output, _lines(vector.format_lines(args.drop_zeros, config.tolerance)))
    return 0


def cmd_validate(args, config: RunConfig) -> int:
    tree = _read_tree(args.input, args.n)
    violations = validate(tree, config.max_qubits, config.tolerance)
    if not violations:
        write_text(args.output, 'valid\n')
        return 0
    write_text(args.output, _lines([violation.format() for violation in violations]))
    raise InvalidTreeError(f"{len(violations)} violation(s)")


def cmd_classify(args, config: RunConfig) -> int:
    tree = _read_tree(args.input, args.n)
    violations = validate(tree, config.max_qubits, config.tolerance)
    if violations:
        raise InvalidTreeError(f"tree fails validation: {violations[0].format()}")
    label = classify_tree(tree, config.max_qubits, config.tolerance).label
    write_text(args.output, _lines([f"class {label}", f"size {tree.size}", f"depth {tree.depth}"]))
    return 0


def _build(args) -> StateTree:
    family = args.family

    def need(name: str):
        value = getattr(args, name)
        if value is None:
            raise ParameterError(f"family '{family}' needs --{name}")
        return value

    if family == 'cat':
        return build_cat(need('n'))
    if family == 'parity':
        return build_parity(need('n'), args.j)
    if family == 'parity-fourier':
        return build_parity_fourier(need('n'), args.j)
    if family == 'cluster1d':
        return build_cluster1d(need('n'))
    if family == 'hamming':
        return build_hamming(need('n'), need('k'))
    if family == 'coset-sigma1':
        return build_coset_sigma1(_read_coset(need('matrix')))
    if family == 'coset-fourier':
        return build_coset_fourier_otree(_read_coset(need('matrix')))
    if family == 'divisibility':
        return build_divisibility_tree(need('n'), need('p'))
    if family == 'knill':
        return build_knill_tree()
    if family == 'bell-pairs':
        return build_bell_pairs(need('n'))
    return build_sigma3_example(need('n'))


def cmd_build(args, config: RunConfig) -> int:
    tree = _build(args)
    if args.amplitudes:
        vector = evaluate(tree, config.max_qubits)
        write_text(args.output, _lines(vector.format_lines(args.drop_zeros, config.tolerance)))
    else:
        write_text(args.output, serialize_tree(tree))
    return 0


def cmd_convert(args, config: RunConfig) -> int:
    text = read_text(args.input)
    if is_formula_text(text):
        formula = parse_formula(text)
        n = args.n if args.n is not None else formula.variables.bit_length()
        write_text(args.output, serialize_tree(formula_to_tree(formula, n, config.tolerance)))
    else:
        write_text(args.output, serialize_formula(tree_to_formula(parse_tree(text, args.n))))
    return 0


def cmd_balance(args, config: RunConfig) -> int:
    formula = parse_formula(read_text(args.input))
    balanced = balance(formula)
    logger.info("balanced formula: size %d -> %d, depth %d -> %d (bound %.1f)",
                formula.size, balanced.size, formula.depth, balanced.depth, depth_bound(balanced.size))
    write_text(args.output, serialize_formula(balanced))
    return 0


def cmd_mots(args, config: RunConfig) -> int:
    if args.random:
        if args.n is None or args.k is None:
            raise ParameterError("random experiments need --n and --k")
        report = mots_random_experiment(args.n, args.k, config.trials, config.seed, config.convention)
        write_text(args.output, _lines(report.format_lines()))
        return 0
    if args.matrix is None:
        raise ParameterError("mots needs --matrix or --random")
    a, b = parse_matrix_text(read_text(args.matrix))
    result = mots_coset(a, config.convention, b, witness=args.witness is not None)
    rank = int(result.ranks[-1])
    write_text(args.output, _lines([f"value {result.value}", f"convention {result.convention}",
                                    f"columns {a.cols}", f"rank {rank}", f"coset_size_log2 {a.cols - rank}"]))
    if args.witness is not None:
        write_text(args.witness, serialize_tree(result.witness))
    if args.table is not None:
        write_text(args.table, _lines(result.table_lines()))
    return 0


def cmd_compile(args, config: RunConfig) -> int:
    tree = _read_tree(args.input, args.n)
    if args.report:
        write_text(args.output, _lines(verify_prepare(tree, settings.SIMULATOR_MAX_QUBITS, config.tolerance)
                                       .format_lines()))
    else:
        write_text(args.output, format_circuit(compile_tree(tree, config.max_qubits, config.tolerance)))
    return 0


def cmd_simulate(args, config: RunConfig) -> int:
    circuit = parse_circuit(read_text(args.input))
    vector = simulate(circuit, settings.SIMULATOR_MAX_QUBITS, config.tolerance)
    write_text(args.output, _lines(vector.format_lines(args.drop_zeros, config.tolerance)))
    return 0


def cmd_rank_exp(args, config: RunConfig) -> int:
    experiment = args.experiment

    def need(name: str):
        value = getattr(args, name)
        if value is None:
            raise ParameterError(f"rank-exp {experiment} needs --{name}")
        return value

    if experiment == 'subgroup':
        report = subgroup_rank_experiment(need('n'), config.trials, config.seed, args.k)
    elif experiment == 'vandermonde':
        params = VandermondeParams(need('n'), need('k'), need('d'), args.c or 0)
        report = vandermonde_rank_experiment(params, config.trials, config.seed)
    elif experiment == 'erasure':
        if args.matrix is not None:
            coset = _read_coset(args.matrix)
        else:
            # the subgroup takes the stream index right after the restriction trials
            coset = Coset.checked(random_bitmatrix(need('k'), need('n'), config.seed, config.trials))
        report = erasure_recoverability_check(coset, need('l'), config.trials, config.seed)
    elif experiment == 'subset-sum':
        report = subset_sum_coverage(need('n'), need('m'), need('p'), need('gamma'), config.trials, config.seed)
    else:
        report = chi_report(_read_state(need('input'), config), args.mode, config.trials, config.seed,
                            config.tolerance)
    write_text(args.output, _lines(report.format_lines()))
    return 0


def cmd_vandermonde(args, config: RunConfig) -> int:
    params = VandermondeParams(args.n, args.k, args.d, args.c or 0)
    matrix = build_binary_vandermonde(params)
    if args.min_weight:
        write_text(args.output, _lines([f"min_weight {min_image_weight(matrix)}",
                                        f"bound {params.weight_bound}"]))
    else:
        write_text(args.output, format_matrix_text(matrix))
    return 0


# ========================================================================
# ================================ parser ================================
# ========================================================================
def _add_run_flags(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """Run flags. Suppressed copies on the subcommands only set a value when the flag is given there."""

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument('--seed', type=int, default=default(0))
    parser.add_argument('--trials', type=int, default=default(100))
    parser.add_argument('--max-qubits', type=int, default=default(settings.MAX_QUBITS))
    parser.add_argument('--convention', choices=settings.CONVENTIONS, default=default(settings.CONVENTION))
    parser.add_argument('--tolerance', type=float, default=default(settings.TOLERANCE))
    parser.add_argument('-v', '--verbose', action='store_true', default=default(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='pytreestates', description='Quantum state trees, multilinear formulas '
                                     'and tree size experiments.')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    _add_run_flags(parser)
    run_flags = argparse.ArgumentParser(add_help=False)
    _add_run_flags(run_flags, suppress=True)
    commands = parser.add_subparsers(dest='command', required=True)

    def command(name: str, handler, help_text: str, needs_input: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, parents=[run_flags])
        if needs_input:
            sub.add_argument('input', help="input file, fixture name or '-'")
        sub.add_argument('-o', '--output', default='-')
        sub.set_defaults(handler=handler)
        return sub

    sub = command('eval', cmd_eval, 'evaluate a tree to amplitudes')
    sub.add_argument('--n', type=int)
    sub.add_argument('--drop-zeros', action='store_true')

    sub = command('validate', cmd_validate, 'list violated tree rules')
    sub.add_argument('--n', type=int)

    sub = command('classify', cmd_classify, 'general, orthogonal or manifestly-orthogonal')
    sub.add_argument('--n', type=int)

    sub = command('build', cmd_build, 'build a named state family', needs_input=False)
    sub.add_argument('family', choices=FAMILIES)
    for name in ('n', 'j', 'k', 'p'):
        sub.add_argument(f"--{name}", type=int, default=0 if name == 'j' else None)
    sub.add_argument('--matrix')
    sub.add_argument('--amplitudes', action='store_true')
    sub.add_argument('--drop-zeros', action='store_true')

    sub = command('convert', cmd_convert, 'tree to formula or formula to tree')
    sub.add_argument('--n', type=int)

    command('balance', cmd_balance, 'balance a multilinear formula')

    sub = command('mots', cmd_mots, 'manifestly orthogonal tree size of a coset state', needs_input=False)
    sub.add_argument('--matrix')
    sub.add_argument('--witness')
    sub.add_argument('--table')
    sub.add_argument('--random', action='store_true', help='random matrices, uses --n, --k and --trials')
    sub.add_argument('--n', type=int)
    sub.add_argument('--k', type=int)

    sub = command('compile', cmd_compile, 'compile an orthogonal tree to a circuit')
    sub.add_argument('--n', type=int)
    sub.add_argument('--report', action='store_true', help='simulate and report fidelity and sizes')

    sub = command('simulate', cmd_simulate, 'simulate a circuit on |0...0>')
    sub.add_argument('--drop-zeros', action='store_true')

    sub = command('rank-exp', cmd_rank_exp, 'rank experiments', needs_input=False)
    sub.add_argument('experiment', choices=('subgroup', 'vandermonde', 'erasure', 'subset-sum', 'chi'))
    for name in ('n', 'k', 'l', 'd', 'c', 'p', 'm'):
        sub.add_argument(f"--{name}", type=int)
    sub.add_argument('--gamma', type=float)
    sub.add_argument('--matrix')
    sub.add_argument('--input')
    sub.add_argument('--mode', choices=('exhaustive', 'sampled'), default='exhaustive')

    sub = command('vandermonde', cmd_vandermonde, 'binary Vandermonde matrix', needs_input=False)
    for name in ('n', 'k', 'd'):
        sub.add_argument(f"--{name}", type=int, required=True)
    sub.add_argument('--c', type=int)
    sub.add_argument('--min-weight', action='store_true')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not 0 <= args.seed < 2 ** 64:
        parser.error("--seed must lie in 0..2^64-1")
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    config = RunConfig(args.command, getattr(args, 'input', None), args.output, args.seed, args.trials,
                       args.max_qubits, args.convention, args.tolerance, args.verbose)
    try:
        return args.handler(args, config)
    except TreeStateError as error:
        print(f"ERROR {error.code}: {error}", file=sys.stderr)
        return 1
    except OSError as error:
        print(f"ERROR io: {error}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
