"""Generalized two-point Ostrowski quadrature with Peano-kernel error bounds."""

from .algebra import HarmonicSequence, Polynomial, shifted_monomial_sequence
from .kernels import Interval, NodeTriple
from .testlib import HolderSpec, NormSpec, TestFunction, get_function

__all__ = [
    "HarmonicSequence",
    "HolderSpec",
    "Interval",
    "NodeTriple",
    "NormSpec",
    "Polynomial",
    "TestFunction",
    "get_function",
    "shifted_monomial_sequence",
]

__version__ = "0.1.0"
