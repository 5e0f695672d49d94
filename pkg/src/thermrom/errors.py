"""Exception taxonomy shared across the toolkit.

Three families map onto the CLI exit codes: bad user input
(InvalidArgument, exit 2), numerical failures (NumericError and
subclasses, exit 3) and storage problems (StoreError and subclasses,
exit 4).
"""


class InvalidArgument(ValueError):
    """An argument is outside its documented domain."""


class NumericError(RuntimeError):
    """Base class for failures of the numerical machinery."""


class AssemblyError(NumericError):
    """Finite-element assembly failed (e.g. a degenerate cell)."""


class SolverError(NumericError):
    """A linear solve failed or did not converge."""


class RankDeficientError(NumericError):
    """Requested basis size exceeds the numerical rank of the data."""


class DependentSnapshotError(NumericError):
    """A snapshot is numerically dependent on the current basis."""


class EmptyBasisError(NumericError):
    """Orthonormalization dropped every input vector."""


class TrainingDivergedError(NumericError):
    """Network training produced a non-finite loss."""


class SingularSystemError(NumericError):
    """An interpolation system is singular (e.g. coincident centers)."""


class StoreError(OSError):
    """Base class for model-package storage failures."""


class CorruptPackageError(StoreError):
    """A stored file does not match its manifest hash."""


class FormatVersionError(StoreError):
    """The package was written with an unsupported format version."""
