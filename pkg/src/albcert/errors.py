"""Exception types shared across the package."""


class AlbcertError(Exception):
    """Base class for all package errors."""


class NotFullTwoTorsion(AlbcertError):
    """Curve lacks fully rational 2-torsion."""


class Degenerate(AlbcertError):
    """Hyperelliptic construction degenerates for these parameters."""


class MapDerivationFailed(AlbcertError):
    """Undetermined-coefficient solve for a covering map had no solution."""


class PrecisionExhausted(AlbcertError):
    """Requested height precision could not be certified."""


class DenomBoundTooSmall(AlbcertError):
    """Point decomposition failed; the denominator bound is too small."""


class NonInvertibleElement(AlbcertError):
    """A gcd inverse failed during Jacobian arithmetic over F_p."""


class NotWeierstrass(AlbcertError):
    """Point is not fixed by the hyperelliptic involution."""


class BadReduction(AlbcertError):
    """Prime divides the discriminant; reduction is not usable."""


class SingularCurve(AlbcertError):
    """Weierstrass model has vanishing discriminant."""


class MissingPairCertificate(AlbcertError):
    """Product combinator is missing a pairwise certificate."""


class MissingRationalPoint(AlbcertError):
    """Product combinator requires a declared rational point on every factor."""


class ParseError(AlbcertError):
    """Input file could not be parsed."""


class ValidationError(AlbcertError):
    """Ingested record is inconsistent (off-curve generator, singular model)."""


class NetworkError(AlbcertError):
    """Remote fetch failed and no cached reply exists."""


class SchemaDrift(AlbcertError):
    """Remote reply is missing required fields."""


class VerificationError(AlbcertError):
    """A certificate transcript assertion failed on re-execution."""
