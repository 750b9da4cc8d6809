"""Exact experiments on second moments of cubic Dirichlet L-functions over F_{q^2}(T), q = 2 mod 3."""

from .characters import FamilySpec, family_iter, family_members
from .lfun import LPolynomial, central_value, l_polynomial
from .moments import compare_report, main_term, sweep
from .series import a_q_value

__all__ = [
    "FamilySpec",
    "LPolynomial",
    "a_q_value",
    "central_value",
    "compare_report",
    "family_iter",
    "family_members",
    "l_polynomial",
    "main_term",
    "sweep",
]
__version__ = "0.1.0"
