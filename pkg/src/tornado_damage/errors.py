"""Exception types shared across the package."""


class TornadoDamageError(Exception):
    """Base class for all package errors."""


class DegenerateColumn(TornadoDamageError):
    """A column has zero sample standard deviation and cannot be standardized."""


class NegativeInput(TornadoDamageError):
    """A log-family transformation received a negative value."""


class DomainViolation(TornadoDamageError):
    """A value fell outside the legal domain of an operation."""


class OutOfCoverage(TornadoDamageError):
    """An extraction window intersects zero raster cells."""


class AllCellsDropped(TornadoDamageError):
    """Every cell under a footprint belongs to an excluded class."""


class NoRegionCoverage(TornadoDamageError):
    """No footprint weight mass lands in any valued region."""


class MissingCpiMonth(TornadoDamageError):
    """The CPI series lacks a month required for inflation adjustment."""


class SchemaMismatch(TornadoDamageError):
    """An input file header does not match the documented schema."""


class EmptyFile(TornadoDamageError):
    """An input file contains no data rows."""


class BadFractions(TornadoDamageError):
    """Split fractions are not positive or do not sum to one."""


class UnknownSourceTag(TornadoDamageError):
    """A column carries a source tag outside the documented set."""


class ShapeMismatch(TornadoDamageError):
    """Array shapes are inconsistent with the declared network layout."""


class NonFiniteLoss(TornadoDamageError):
    """Training produced a non-finite loss value."""

    def __init__(self, epoch: int, batch: int, value: float):
        self.epoch = epoch
        self.batch = batch
        self.value = value
        super().__init__(f"non-finite loss {value!r} at epoch {epoch}, batch {batch}")


class RankDeficient(TornadoDamageError):
    """The design matrix for a linear fit is not full column rank."""


class ZeroVariance(TornadoDamageError):
    """R-squared is undefined because the truth values have no variance."""


class OneClassOnly(TornadoDamageError):
    """AUROC is undefined because only one label class is present."""


class RosterMismatch(TornadoDamageError):
    """A feature vector does not match the model's feature roster."""


class InvalidPolygon(TornadoDamageError):
    """A polygon ring has fewer than three vertices or is malformed."""


class VersionMismatch(TornadoDamageError):
    """A persisted bundle declares an unsupported format version."""


class CorruptBundle(TornadoDamageError):
    """A persisted bundle fails its checksum or cannot be parsed."""
