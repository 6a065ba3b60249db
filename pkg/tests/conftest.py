"""Shared helpers: conversions to sympy used as independent oracles."""

import sys
from fractions import Fraction

import sympy as sp
from hypothesis import strategies as st

from severi.polyalg import RationalPoly, WeierstrassPoly

Z, W, T = sp.symbols("z w t")


def to_sympy(p: RationalPoly, var=Z):
    return sum(sp.Rational(c.numerator, c.denominator) * var**i for i, c in enumerate(p.coeffs))


def from_sympy(expr, var=Z) -> RationalPoly:
    poly = sp.Poly(sp.expand(expr), var)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
    return RationalPoly(coeffs)


def weierstrass_to_sympy(P: WeierstrassPoly):
    return sum(to_sympy(a) * W ** (P.d - i) for i, a in enumerate(P.a))


small_fracs = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


def polys(max_degree=3):
    return st.lists(small_fracs, min_size=0, max_size=max_degree + 1).map(RationalPoly)


def nonzero_polys(max_degree=3):
    return polys(max_degree).filter(lambda p: not p.is_zero)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not getattr(module, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
