"""Exception types shared across the toolkit."""


class DronedetError(Exception):
    """Base class for every error this package raises on purpose."""


# text formats
class MalformedLine(DronedetError):
    """Line does not match the declared field grammar."""


class InvalidGeometry(DronedetError):
    """Box is degenerate, inverted, or non-finite."""


class InvalidCategory(DronedetError):
    """Category id outside the 0..11 vocabulary."""


class InvalidScore(DronedetError):
    """Detection score outside [0, 1] or non-finite."""


# geometry / codec
class NonPositiveScale(DronedetError):
    """Rescale factor must be positive and finite."""


class InvalidOverlap(DronedetError):
    """Minimum overlap for the gaussian radius must lie in (0, 1]."""


class CenterOutOfBounds(DronedetError):
    """Splat center falls outside the heatmap."""


class ObjectOutOfBounds(DronedetError):
    """Object center maps to a cell outside the output grid."""


class StrideMismatch(DronedetError):
    """Input dimensions are not divisible by the stride."""


# losses
class ShapeMismatch(DronedetError):
    """Array shapes disagree."""


class NonPositiveObjectCount(DronedetError):
    """Object count used for loss normalization must be positive."""


class CellOutOfBounds(DronedetError):
    """Regression mask cell falls outside the map."""


# test-time augmentation
class UnknownScale(DronedetError):
    """Scale factor must be positive."""


class ProviderFailure(DronedetError):
    """Map provider could not supply a requested (scale, flip) combination."""


# evaluation
class ImageIdMismatch(DronedetError):
    """Detection and annotation collections disagree on image ids."""


class EmptyGroundTruth(DronedetError):
    """No evaluated-class ground truth anywhere in the dataset."""


# binary map files
class BadMagic(DronedetError):
    """File does not start with the CNHM magic."""


class UnsupportedVersion(DronedetError):
    """File version is not supported by this reader."""


class CorruptFile(DronedetError):
    """Payload is truncated or has trailing garbage."""


class DimensionMismatch(DronedetError):
    """Header dimensions are internally inconsistent."""


# reporting
class UnknownFormat(DronedetError):
    """Requested report format is not one of csv, markdown, svg."""


class EmptyReport(DronedetError):
    """Nothing to render."""
