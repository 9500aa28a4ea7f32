from enum import Enum


class GridUnit(str, Enum):
    """Unit tag carried by every grid"""
    HU = "HU"
    ATTENUATION = "attenuation"  # per mm
    NORMALIZED = "normalized"  # windowed to [0, 1]
    LINE_INTEGRAL = "line_integral"
    DIMENSIONLESS = "dimensionless"
    BINARY = "binary"


class GridKind(str, Enum):
    """Role of a grid in the raw+JSON file format"""
    IMAGE = "image"
    SINOGRAM = "sinogram"
    MASK = "mask"
    TRACE = "trace"


class BeamModel(str, Enum):
    PARALLEL = "parallel"
    FAN_EQUIANGULAR = "fan-equiangular"


class FilterWindow(str, Enum):
    RAMP = "ramp"
    HANN = "hann"


class PadMode(str, Enum):
    PERIODIC = "periodic"
    FLIP_WRAP = "flip_wrap"  # parallel half-turn: S(θ+π, s) = S(θ, -s)
    ZERO = "zero"  # non-periodic baseline, any scan range


class MarMethod(str, Enum):
    LI = "li"
    NMAR = "nmar"


class PriorSource(str, Enum):
    """Image the NMAR prior is segmented from"""
    LI = "li"
    MA = "ma"


class PriorProvenance(str, Enum):
    THRESHOLD_SEGMENTED = "threshold-segmented"
    EXTERNALLY_SUPPLIED = "externally-supplied"


class IngestFlag(str, Enum):
    EMPTY_METAL = "empty_metal"
    BELOW_SELECTION_CRITERION = "below_selection_criterion"


class CaseStatus(str, Enum):
    COMPLETED = "completed"
    FAILED = "failed"
