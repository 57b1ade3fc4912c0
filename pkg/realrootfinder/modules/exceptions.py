class RealRootFinderError(Exception):
    """Base class of every error raised by this package"""

    pass


class InputError(RealRootFinderError, ValueError):
    """Raised when an argument violates an operation's precondition"""

    pass


class AlgorithmFailure(RealRootFinderError):
    """Raised when a numerical method fails on a valid input"""

    pass


class PolynomialFormatError(RealRootFinderError):
    """Raised when a polynomial file can not be parsed"""

    pass


# input errors


class ZeroScale(InputError):
    """Raised when a polynomial is scaled by zero"""

    pass


class Pole(InputError):
    """Raised when a Cayley map is evaluated at its pole"""

    pass


class DegreeDrop(InputError):
    """Raised when a root map sends a root to infinity"""

    pass


class DivisionByZeroPoly(InputError, ZeroDivisionError):
    """Raised when dividing by the zero polynomial"""

    pass


class ZeroLeadingCoefficient(InputError):
    """Raised when a companion matrix is requested for a zero leading coefficient"""

    pass


class DimensionMismatch(InputError):
    """Raised when operand sizes do not agree"""

    pass


class ModulusMismatch(InputError):
    """Raised when two Frobenius elements have different moduli"""

    pass


class ZeroInput(InputError):
    """Raised when the Moebius step is applied to zero"""

    pass


class RealInput(InputError):
    """Raised when a convergence bound is requested for a real starting point"""

    pass


class ZeroConstantTerm(InputError):
    """Raised when an operation needs p(0) to be nonzero"""

    pass


class RootAtPoint(InputError):
    """Raised when a proximity test is centered at a root"""

    pass


class NotUnitary(InputError):
    """Raised when a basis does not have orthonormal columns"""

    pass


class InvalidConfig(InputError):
    """Raised when a configuration value is out of range or unknown"""

    pass


# algorithm failures


class RankDeficient(AlgorithmFailure):
    """Raised when a QR factorization meets a numerically dependent column"""

    pass


class SingularMatrix(AlgorithmFailure):
    """Raised when LU elimination meets a negligible pivot"""

    pass


class IllConditioned(AlgorithmFailure):
    """Raised when an inverse exists but its condition estimate is too large"""

    pass


class NoConvergence(AlgorithmFailure):
    """Raised when an iterative kernel runs out of sweeps"""

    pass


class NotInvertible(AlgorithmFailure):
    """Raised when a residue shares an approximate factor with its modulus"""

    pass


class SubspaceFailure(AlgorithmFailure):
    """Raised when the dominant eigenspace is not found within the allowed attempts"""

    pass


class NoStableRank(AlgorithmFailure):
    """Raised when the sketch rank keeps changing up to the largest sketch"""

    pass


class MaxIterExceeded(AlgorithmFailure):
    """Raised when an iteration hits its limit. The last iterate is kept in `last`"""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.message = message
        self.last = last


class ScalingFailed(AlgorithmFailure):
    """Raised when no power-of-two scaling makes Newton-Schultz converge"""

    pass


class DivergenceDetected(AlgorithmFailure):
    """Raised when an inversion-free step blows up"""

    pass


class DerivativeVanished(AlgorithmFailure):
    """Raised when Newton's method meets a zero derivative"""

    pass


class CoincidentIterates(AlgorithmFailure):
    """Raised when two simultaneous iterates collide"""

    pass


class ZeroOnCircle(AlgorithmFailure):
    """Raised when a polynomial vanishes on the counting circle"""

    pass


class PrecisionLoss(AlgorithmFailure):
    """Raised when root squaring spreads coefficients beyond double range"""

    pass


class OracleDisagreement(AlgorithmFailure):
    """Raised when the reference solvers return different root sets"""

    pass


class NoCommonFactor(AlgorithmFailure):
    """Raised when no approximate common divisor of positive degree exists"""

    pass
