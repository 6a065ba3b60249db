import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import T, W, Z, from_sympy, to_sympy, weierstrass_to_sympy
from severi.nodal import (
    BranchGerm,
    CurveGerm,
    GermError,
    GermMismatchError,
    assemble_polynomial,
    branch_delta,
    branch_to_weierstrass,
    classify_double_zero,
    curve_delta,
    delta_per_line,
    equisingular_codim,
    jet_at,
    jet_correct,
    pairwise_delta,
)
from severi.polyalg import RationalPoly, WeierstrassPoly, discriminant

R = RationalPoly
z = R.z()


def sympy_implicit(b: BranchGerm):
    """Res_t(z - z0 - t^m, w - phi(t)), normalised to be monic in w."""
    res = sp.resultant(Z - sp.Rational(b.z0.numerator, b.z0.denominator) - T**b.m, W - to_sympy(b.phi, T), T)
    poly = sp.Poly(sp.expand(res), W)
    return sp.expand(poly.as_expr() / poly.LC())


def sympy_ord(expr, z0=0):
    expr = sp.expand(expr)
    if expr == 0:
        return None
    n = 0
    while sp.expand(expr).subs(Z, z0) == 0:
        expr = sp.cancel(expr / (Z - z0))
        n += 1
    return n


def random_branch(rng, z0=0):
    while True:
        m = rng.randint(1, 3)
        coeffs = [Fraction(rng.randint(-2, 2)) for _ in range(rng.randint(1, 5) + 1)]
        b = BranchGerm(z0, m, R(coeffs))
        if b.is_reduced():
            return b


# --- implicitization -------------------------------------------------------


def test_implicitization_examples():
    assert branch_to_weierstrass(BranchGerm(0, 1, R([0, 1]))).a == (R([1]), -z)
    assert branch_to_weierstrass(BranchGerm(0, 2, R([0, 0, 0, 1]))).a == (R([1]), R(), -(z**3))
    with pytest.raises(GermError):
        branch_to_weierstrass(BranchGerm(0, 2, R([0, 0, 1])))


def test_implicitization_matches_sympy_resultant():
    rng = random.Random(2)
    for _ in range(40):
        b = random_branch(rng, z0=Fraction(rng.randint(-2, 2), rng.randint(1, 2)))
        assert sp.expand(weierstrass_to_sympy(branch_to_weierstrass(b)) - sympy_implicit(b)) == 0


def test_branch_invariants_validate():
    with pytest.raises(GermError):
        BranchGerm(0, 0, R([1]))
    with pytest.raises(GermError):
        CurveGerm(0, 0, (BranchGerm(1, 1, R([0, 1])),))
    with pytest.raises(GermError):
        CurveGerm(0, -1, ())


# --- deltas -----------------------------------------------------------------


@pytest.mark.parametrize(
    "m, phi, delta",
    [(2, [0, 0, 0, 1], 1), (1, [3, 1, 4], 0), (3, [0, 0, 0, 0, 1], 3), (2, [0, 0, 0, 0, 0, 1], 2)],
)
def test_branch_delta_examples(m, phi, delta):
    b = BranchGerm(0, m, R(phi))
    assert branch_delta(b) == delta
    # oracle: sympy discriminant of the sympy implicitization
    n = sympy_ord(sp.discriminant(sympy_implicit(b), W))
    assert (n - (m - 1)) // 2 == delta


def test_pairwise_examples():
    assert pairwise_delta(BranchGerm(0, 1, R([0, 1])), BranchGerm(0, 1, R([0, -1]))) == 1
    assert pairwise_delta(BranchGerm(0, 1, R([0])), BranchGerm(0, 1, R([0, 0, 1]))) == 2
    assert pairwise_delta(BranchGerm(0, 2, R([0, 0, 0, 1])), BranchGerm(0, 1, R([0]))) == 3
    with pytest.raises(GermError):
        pairwise_delta(BranchGerm(0, 1, R([0, 1])), BranchGerm(0, 1, R([0, 1])))


def test_pairwise_symmetric_and_matches_sympy():
    rng = random.Random(8)
    for _ in range(25):
        b1, b2 = random_branch(rng), random_branch(rng)
        try:
            v = pairwise_delta(b1, b2)
        except GermError:
            continue
        assert v == pairwise_delta(b2, b1)
        assert v == sympy_ord(sp.resultant(sympy_implicit(b1), sympy_implicit(b2), W))


def test_curve_delta_examples():
    g1, g2 = BranchGerm(0, 1, R([0, 1])), BranchGerm(0, 1, R([0, -1]))
    r = curve_delta(CurveGerm(0, 1, (g1, g2)), 3)
    assert (r.delta_total, r.vertical_term, r.ord_dscr, r.extra_sheets) == (4, 3, 6, 1)
    assert curve_delta(CurveGerm(0, 0, (BranchGerm(0, 1, R([0, 1])),))).delta_total == 0
    node = curve_delta(CurveGerm(0, 0, (g1, g2)))
    assert (node.delta_total, node.ord_dscr, node.euler_char) == (1, 2, 2)
    assert node.euler_identity and node.branching_identity


def test_curve_delta_rejects_small_degree():
    with pytest.raises(GermError):
        curve_delta(CurveGerm(0, 0, (BranchGerm(0, 2, R([0, 0, 0, 1])),)), 1)


def germs():
    branch = st.tuples(
        st.integers(1, 3),
        st.lists(st.integers(-2, 2), min_size=2, max_size=6),
    )
    return st.tuples(st.integers(0, 2), st.lists(branch, min_size=1, max_size=3), st.integers(0, 2))


@settings(max_examples=60, deadline=None)
@given(germs())
def test_identities_hold_on_random_germs(data):
    vm, raw, extra = data
    branches = []
    for m, coeffs in raw:
        b = BranchGerm(0, m, R(coeffs))
        if b.is_reduced() and all(b.phi != o.phi or b.m != o.m for o in branches):
            branches.append(b)
    c = CurveGerm(0, vm, tuple(branches))
    d = c.branch_degree + extra
    if d == 0:
        return
    try:
        r = curve_delta(c, d, strict=False)
    except GermError:
        return  # two branches parametrise the same curve
    assert r.euler_identity and r.branching_identity
    # oracle: sympy discriminant of the assembled product
    P = assemble_polynomial(c, d)
    assert r.ord_dscr == sympy_ord(sp.discriminant(weierstrass_to_sympy(P), W))


# --- delta along lines -------------------------------------------------------


def test_delta_per_line_two_nodes():
    q = z * (z - 1)
    P = WeierstrassPoly(2, (R([1]), R(), -(q * q)))
    germs = {
        0: CurveGerm(0, 0, (BranchGerm(0, 1, R([0, -1, 1])), BranchGerm(0, 1, R([0, 1, -1])))),
        1: CurveGerm(1, 0, (BranchGerm(1, 1, R([0, 1, 1])), BranchGerm(1, 1, R([0, -1, -1])))),
    }
    out = delta_per_line(P, germs, euler_char=2)
    assert out.per_line == {0: 1, 1: 1}
    assert out.total == 2
    assert out.tags == {0: "node", 1: "node"}
    assert out.global_check is True
    assert out.containment[Fraction(0)] == ["exact", "exact"]


def test_delta_per_line_smooth_and_vertical():
    smooth = WeierstrassPoly(1, (R([1]), -(z**2)))
    assert delta_per_line(smooth, {}).total == 0
    P = WeierstrassPoly(2, (z, R(), -z))  # z (w^2 - 1)
    germ = CurveGerm(0, 1, (BranchGerm(0, 1, R([1])), BranchGerm(0, 1, R([-1]))))
    out = delta_per_line(P, {0: germ})
    assert out.per_line == {0: 2}
    assert out.tags[Fraction(0)] == "vertical-component"


def test_double_zero_tags():
    infl = WeierstrassPoly(3, (R([1]), R(), R(), -z))
    out = delta_per_line(infl, {0: CurveGerm(0, 0, (BranchGerm(0, 3, R([0, 1])),))})
    assert out.tags[Fraction(0)] == "vertical-inflection"
    assert out.total == 0
    pair = CurveGerm(0, 0, (BranchGerm(0, 2, R([0, 1])), BranchGerm(0, 2, R([1, 1]))))
    assert classify_double_zero(pair, curve_delta(pair)) == "double-tangency"
    node = CurveGerm(0, 0, (BranchGerm(0, 1, R([0, 1])), BranchGerm(0, 1, R([0, -1]))))
    assert classify_double_zero(node, curve_delta(node)) == "node"


def test_delta_per_line_unresolved_and_mismatch():
    P = WeierstrassPoly(2, (R([1]), R(), -(z**2 - 2)))  # disc 4(z^2 - 2)
    out = delta_per_line(P, {})
    assert out.total == 0 and len(out.unresolved) == 1
    Q = WeierstrassPoly(2, (R([1]), R(), -(z**2)))
    with pytest.raises(GermMismatchError):
        delta_per_line(Q, {})
    wrong = CurveGerm(0, 0, (BranchGerm(0, 1, R([0, 2])), BranchGerm(0, 1, R([0, -2]))))
    with pytest.raises(GermMismatchError):
        delta_per_line(Q, {0: wrong})


# --- equisingular codimension ---------------------------------------------------


def test_equisingular_examples():
    two_graphs = (BranchGerm(0, 1, R([0, 1])), BranchGerm(0, 1, R([1, 1])))
    r = equisingular_codim(CurveGerm(0, 1, two_graphs), 3)
    assert (r.case, r.delta_star, r.m_star, r.b0, r.codim) == ("i", 3, 1, 3, 4)
    node = (BranchGerm(0, 1, R([0, 1])), BranchGerm(0, 1, R([0, -1])))
    assert equisingular_codim(CurveGerm(0, 0, node)).codim == 2
    cusp = CurveGerm(0, 0, (BranchGerm(0, 2, R([0, 0, 0, 1])),))
    r = equisingular_codim(cusp)
    assert (r.case, r.codim) == ("iii", 3)


def test_equisingular_tangent_and_general():
    tangent = CurveGerm(0, 0, (BranchGerm(0, 1, R([0])), BranchGerm(0, 1, R([0, 0, 1]))))
    r = equisingular_codim(tangent)
    assert r.case == "ii-tangent" and not r.exact and r.codim == 2 + 2
    e6 = CurveGerm(0, 0, (BranchGerm(0, 3, R([0, 0, 0, 0, 1])),))
    r = equisingular_codim(e6)
    assert r.case == "general-lower-bound" and not r.exact


# --- jet correction ---------------------------------------------------------------


def test_jet_correct_examples():
    H, q = jet_correct([(0, 2)], [R([1, 1])], R())
    assert H == R([1, 1]) and q == R([1, 1])
    H, q = jet_correct([(0, 1), (1, 1)], [R([0]), R([0])], R([1]))
    assert q == R([-1])
    G = z**3 - 2 * z
    H, q = jet_correct([(2, 3)], [jet_at(G, 2, 3)], G)
    assert q.is_zero and H == G
    with pytest.raises(GermError):
        jet_correct([(0, 1), (0, 2)], [R([1]), R([1, 1])], R())
    with pytest.raises(GermError):
        jet_correct([(0, 1)], [R([1, 1])], R())


def linear_solve_oracle(points, jets, G):
    """Dense solve for the coefficients of q: one equation per jet coefficient."""
    n = sum(m for _, m in points)
    cs = sp.symbols(f"c0:{n}")
    q = sum(c * Z**i for i, c in enumerate(cs))
    eqs = []
    for (zeta, m), jet in zip(points, jets):
        zeta = sp.Rational(zeta.numerator, zeta.denominator)
        H = to_sympy(G) + q
        for r in range(m):
            lhs = sp.diff(H, Z, r).subs(Z, zeta) / sp.factorial(r)
            eqs.append(sp.Eq(lhs, sp.Rational(jet.coeff(r).numerator, jet.coeff(r).denominator)))
    sol = sp.solve(eqs, cs, dict=True)
    assert len(sol) == 1
    return from_sympy(q.subs(sol[0])) if n else R()


def test_jet_correct_matches_linear_solve():
    rng = random.Random(12)
    for _ in range(25):
        npts = rng.randint(1, 3)
        zetas = rng.sample(range(-4, 5), npts)
        points = [(Fraction(zt), rng.randint(1, 3)) for zt in zetas]
        jets = [R([rng.randint(-3, 3) for _ in range(m)]) for _, m in points]
        G = R([rng.randint(-3, 3) for _ in range(rng.randint(0, 6))])
        H, q = jet_correct(points, jets, G)
        assert q == linear_solve_oracle(points, jets, G)
        for (zeta, m), jet in zip(points, jets):
            assert jet_at(H, zeta, m) == jet


def test_delta_per_line_accepts_series_jets():
    """Two parabolas: tangent at z = 0, transverse node at z = 1/4 (series branches)."""
    P = branch_to_weierstrass(BranchGerm(0, 2, R([0, 1]))) * branch_to_weierstrass(BranchGerm(0, 2, R([1, 1])))
    q = Fraction(1, 4)
    root = [Fraction(1, 2), 1, -1, 2, -5]  # sqrt(1/4 + u)
    germs = {
        0: CurveGerm(0, 0, (BranchGerm(0, 2, R([0, 1])), BranchGerm(0, 2, R([1, 1])))),
        q: CurveGerm(q, 0, (BranchGerm(q, 1, R(root)), BranchGerm(q, 1, R([1 - root[0]] + [-c for c in root[1:]])))),
    }
    out = delta_per_line(P, germs)
    assert out.per_line == {q: 1}
    assert out.tags == {Fraction(0): "double-tangency", q: "node"}
    assert out.containment[q] == ["jet", "jet"]
    assert out.containment[Fraction(0)] == ["exact", "exact"]
