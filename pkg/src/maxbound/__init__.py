"""Fourier transforms of ball and sphere products, their radial derivatives,
discrete maximal operators, and numerical certification of decay bounds."""

from . import body_geometry, certify, fourier, frac_calculus, maximal_grid, radial_deriv, specfun
from .certify import CertificationReport, Check
from .errors import ConfigError, DomainError, MaxboundError, NumericError, RangeError, ResourceError, ShapeError
from .fourier import ProductGeometry
from .kernels import BACKEND
from .report import SuiteConfig, emit_report

__version__ = "0.1.0"

__all__ = [
    "body_geometry",
    "certify",
    "fourier",
    "frac_calculus",
    "maximal_grid",
    "radial_deriv",
    "specfun",
    "CertificationReport",
    "Check",
    "ConfigError",
    "DomainError",
    "MaxboundError",
    "NumericError",
    "RangeError",
    "ResourceError",
    "ShapeError",
    "ProductGeometry",
    "BACKEND",
    "SuiteConfig",
    "emit_report",
]
