"""
Exceptions raised by pytreestates. Each carries a short code used by the CLI
("ERROR <code>: <message>").
"""


class TreeStateError(Exception):
    code = 'error'


class OversizeError(TreeStateError):
    code = 'oversize'


class InvalidTreeError(TreeStateError):
    code = 'invalid-tree'


class DslSyntaxError(TreeStateError):
    code = 'syntax'

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DimensionMismatchError(TreeStateError):
    code = 'dimension'


class NotUnitaryError(TreeStateError):
    code = 'not-unitary'


class NotMultilinearError(TreeStateError):
    code = 'not-multilinear'


class EmptyCosetError(TreeStateError):
    code = 'empty-coset'


class ParameterError(TreeStateError):
    code = 'parameter'


class NotOrthogonalError(TreeStateError):
    code = 'not-orthogonal'


class PrepOnNonzeroError(TreeStateError):
    code = 'prep-on-nonzero'


class ConvergenceError(TreeStateError):
    code = 'no-convergence'
