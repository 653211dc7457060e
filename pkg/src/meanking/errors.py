"""Exception hierarchy.

Every error raised by the library derives from :class:`MeanKingError` so the
CLI can map whole families of failures onto exit codes.
"""


class MeanKingError(Exception):
    """Base class for all library errors."""


class InputError(MeanKingError, ValueError):
    """Bad user input (exit code 2 in the CLI)."""


class ValidationError(MeanKingError):
    """A constructed object failed a certified invariant (exit code 3)."""


# --- galois ---------------------------------------------------------------

class NotPrime(InputError):
    def __init__(self, p):
        self.p = p
        super().__init__(f"{p} is not prime")


class BadDegree(InputError):
    def __init__(self, n, poly):
        self.n, self.poly = n, poly
        super().__init__(
            f"polynomial needs exactly n={n} coefficients c0..c{n - 1}, got {list(poly)}"
        )


class Reducible(InputError):
    """``witness`` holds the monic factor's coefficients, lowest degree first."""

    def __init__(self, poly, witness, root=None):
        self.poly, self.witness, self.root = poly, witness, root
        detail = f"has root {root}" if root is not None else f"is divisible by {witness}"
        super().__init__(f"polynomial {poly} is reducible: it {detail}")


class OutOfRange(InputError):
    def __init__(self, x, size):
        self.x, self.size = x, size
        super().__init__(f"{x} is outside 0..{size - 1}")


class SpecMismatch(InputError):
    pass


class ZeroInverse(MeanKingError, ZeroDivisionError):
    def __init__(self):
        super().__init__("zero has no multiplicative inverse")


class ZeroInput(InputError):
    pass


# --- weylalg --------------------------------------------------------------

class UnknownSymbol(InputError):
    def __init__(self, symbol, p):
        self.symbol, self.p = symbol, p
        super().__init__(f"unknown operator symbol {symbol!r} for p={p}")


class DimMismatch(InputError):
    pass


class NotAnEigenvector(ValidationError):
    def __init__(self, residual, tol):
        self.residual = residual
        super().__init__(f"state is not an eigenvector (residual {residual:.3e} >= {tol:.1e})")


# --- mub ------------------------------------------------------------------

class UnsupportedDimension(InputError):
    def __init__(self, d, supported):
        self.d = d
        super().__init__(f"dimension {d} is not supported (supported: {sorted(supported)})")


class SetValidationFailed(ValidationError):
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class DegenerateSignatures(ValidationError):
    pass


class PhaseConventionUnavailable(ValidationError):
    pass


# --- kings ----------------------------------------------------------------

class ConditionViolated(ValidationError):
    def __init__(self, m, j, k, deviation):
        self.m, self.j, self.k = m, j, k
        super().__init__(
            f"<0_{j}|{m}_{k}> != <{m}bar_{k}|0bar_{j}> (deviation {deviation:.3e})"
        )


class MIndependenceViolated(ValidationError):
    def __init__(self, m, deviation):
        self.m, self.deviation = m, deviation
        super().__init__(f"initial state built from basis {m} deviates by {deviation:.3e}")


class BadPairing(InputError):
    pass


class GramDeviation(ValidationError):
    def __init__(self, what, deviation):
        self.deviation = deviation
        super().__init__(f"{what}: Gram matrix deviates from identity by {deviation:.3e}")


class PredictionFailed(MeanKingError):
    """The physicist's prediction disagreed with the king's outcome (exit code 4)."""

    def __init__(self, transcript):
        self.transcript = transcript
        super().__init__(f"prediction failed: {transcript}")
