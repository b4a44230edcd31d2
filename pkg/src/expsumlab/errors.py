"""Exception hierarchy shared by all modules."""


class ExpSumError(Exception):
    """Base class for all library errors."""


class NotInvertible(ExpSumError):
    """Argument shares a factor with the modulus where a unit is required."""


class ModuliNotCoprime(ExpSumError):
    """CRT-style composition attempted with gcd(m, n) > 1."""


class NotPrime(ExpSumError):
    """A prime modulus was required."""


class NotSquarefree(ExpSumError):
    """A squarefree modulus was required."""


class ZeroArgument(ExpSumError):
    """Zero passed where a nonzero residue is required."""


class ModulusMismatch(ExpSumError):
    """Two tables with different moduli were combined."""


class LengthMismatch(ExpSumError):
    """Two series of different lengths were combined."""


class SeriesTooShort(ExpSumError):
    """Coefficient series does not cover the summation range."""


class ResidueNotCoprime(ExpSumError):
    """Arithmetic-progression residue not coprime to the modulus."""


class DegenerateFit(ExpSumError):
    """Regression input has no spread in the abscissa."""


class UnknownSymmetryGroup(ExpSumError):
    """Degeneracy classification requested for a spec without declared symmetry data."""


class SpecFormatError(ExpSumError):
    """Malformed serialized spec or CSV file; message names the offending key."""
