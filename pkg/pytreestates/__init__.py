"""
Quantum state trees, multilinear formulas and the tree-size toolbox around them.
"""
__version__ = '0.1.0'
