"""Machine-checkable finiteness certificates for componentwise Albanese
kernels of products of curves over Q."""

__version__ = "0.1.0"

from .certmodel import Certificate, Undecided, ZeroCycle, render_cycle
from .curves import ECPoint, EllipticCurve, INFINITY
from .genus2 import Genus2Curve, certify_self_product
from .scholten import HyperCurve, ScholtenDatum, build_curve, build_maps, six_variants
from .tensor import RunOptions, run, run_and_certify

__all__ = [
    "Certificate",
    "Undecided",
    "ZeroCycle",
    "render_cycle",
    "ECPoint",
    "EllipticCurve",
    "INFINITY",
    "Genus2Curve",
    "certify_self_product",
    "HyperCurve",
    "ScholtenDatum",
    "build_curve",
    "build_maps",
    "six_variants",
    "RunOptions",
    "run",
    "run_and_certify",
    "__version__",
]
