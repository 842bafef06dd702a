from enum import Enum, IntEnum


class CrystalDirection(str, Enum):
    """
    Polarization axis of the driving field, named after the ZnO crystal direction it follows.
    """
    GAMMA_M = "gm"
    GAMMA_K = "gk"
    GAMMA_A = "ga"

    @property
    def axis(self) -> str:
        return {"gm": "x", "gk": "y", "ga": "z"}[self.value]


class Band(str, Enum):
    VALENCE = "v"
    CONDUCTION = "c"


class EnvelopeKind(str, Enum):
    GAUSSIAN = "gaussian"


class FwhmOf(str, Enum):
    """
    Which quantity the configured pulse duration is the full width at half maximum of.
    """
    FIELD = "field"
    INTENSITY = "intensity"


class WindowKind(str, Enum):
    HANN = "hann"
    NONE = "none"


class Derivative(str, Enum):
    TIME = "time"
    FREQUENCY = "frequency"


class KaneConvention(str, Enum):
    TEXT = "text"
    TABLE = "table"


class Component(str, Enum):
    """
    Which current channel feeds the mode displacements.
    """
    TOTAL = "total"
    INTER = "inter"
    INTRA = "intra"


class Provenance(str, Enum):
    TDSE = "tdse"
    SBE = "sbe"


class Reference(str, Enum):
    FOCK1 = "fock1"
    COHERENT = "coherent"
    VACUUM = "vacuum"


class CalibrationTarget(str, Enum):
    CHI = "chi"
    ENTROPY = "entropy"


class ScanAxis(str, Enum):
    Q = "q"
    E0 = "e0"
    T2 = "t2"


class ExitCode(IntEnum):
    """
    Process exit codes of the command-line tool.
    """
    OK = 0
    CONFIG_ERROR = 1
    NUMERICAL_FAILURE = 2
    IO_ERROR = 3
    INTERRUPTED = 130
