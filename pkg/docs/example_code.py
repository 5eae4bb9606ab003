import logging

from pytreestates.bridge import formula_to_tree, tree_to_formula
from pytreestates.builders import build_cluster1d, build_hamming, build_knill_tree, build_parity
from pytreestates.circuit import compile_tree, format_circuit, verify_prepare
from pytreestates.dsl import serialize_formula, serialize_tree
from pytreestates.formula import balance
from pytreestates.gf2 import parity_matrix, random_bitmatrix
from pytreestates.mots import mots_coset, mots_random_experiment
from pytreestates.rank_harness import chi_max, subgroup_rank_experiment
from pytreestates.state_tree import classify_tree, evaluate


def main():
    logging.basicConfig(level=logging.INFO)
    example_trees_01()
    example_formulas_01()
    example_mots_01()
    example_circuit_01()
    example_rank_experiments_01()


def example_trees_01():
    parity = build_parity(6, 1)
    print(f"parity state on 6 qubits: size {parity.size}, {classify_tree(parity).label}")
    for line in evaluate(parity).format_lines(drop_zeros=True)[:4]:
        print(line)

    cluster = build_cluster1d(8)
    print(f"1-d cluster state on 8 qubits: size {cluster.size}, chi {chi_max(evaluate(cluster))}")


def example_formulas_01():
    tree = build_hamming(4, 2)
    formula = tree_to_formula(tree)
    print(serialize_formula(formula))
    balanced = balance(formula)
    print(f"formula depth {formula.depth} -> {balanced.depth}")
    # back to a tree; the state is the normalized vector of formula values
    print(serialize_tree(formula_to_tree(balanced, 4)))


def example_mots_01():
    for n in (2, 4, 8):
        print(f"parity {n}: manifestly orthogonal tree size {mots_coset(parity_matrix(n), witness=False).value}")
    a = random_bitmatrix(4, 10, seed=1)
    result = mots_coset(a)
    print(f"random 4x10 coset: {result.value} leaves, witness size {result.witness.size}")

    report = mots_random_experiment(12, 6, trials=20, seed=3)
    print('\n'.join(report.format_lines()))


def example_circuit_01():
    tree = build_knill_tree()
    print(format_circuit(compile_tree(tree)))
    print('\n'.join(verify_prepare(tree).format_lines()))


def example_rank_experiments_01():
    report = subgroup_rank_experiment(12, trials=200, seed=0)
    print('\n'.join(report.format_lines()))


if __name__ == '__main__':
    main()
