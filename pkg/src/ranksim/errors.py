"""Exception types shared across the package.

Contract violations (bad parameter ranges, mismatched lengths) raise plain
``ValueError``; the classes below mark conditions caused by the *data* fed
to the library, which the CLI maps to its data-error exit code.
"""


class RanksimError(Exception):
    """Base class for data-level errors raised by ranksim."""


class FormatError(RanksimError):
    """A file or stream does not conform to its declared format."""


class OOVError(RanksimError):
    """A token or phrase could not be resolved against the vocabulary."""


class EvaluationError(RanksimError):
    """An evaluation is degenerate (too little usable data, mismatched inputs)."""
