"""Germ-level invariants of curves near a vertical line ``l_{z0}``.

A curve germ at ``z0`` consists of a vertical line of multiplicity ``m`` and
non-vertical branches ``z = z0 + t^m_j, w = phi_j(t)``.  The virtual nodal
number is read off the vanishing orders of discriminants and resultants:

* a branch of covering degree ``m_j`` has ``ord Dscr = 2 delta_j + m_j - 1``;
* two branches meet with index ``delta_ij = ord Res_w``;
* ``delta = d * m + sum delta_j + sum delta_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .polyalg import (
    ONE,
    ZERO,
    PolyError,
    RationalPoly,
    WeierstrassPoly,
    _frac,
    discriminant,
    factor_vertical,
    linear_factor_split,
    ord_at,
    poly_xgcd,
    resultant,
)


class GermError(ValueError):
    """Invalid germ input (non-reduced branch, mismatched base points, ...)."""


class ConsistencyError(RuntimeError):
    """A formula identity failed; signals a bug rather than bad input."""


class GermMismatchError(GermError):
    """Supplied germs do not describe the given polynomial."""


@dataclass(frozen=True)
class BranchGerm:
    z0: Fraction
    m: int
    phi: RationalPoly

    def __post_init__(self):
        object.__setattr__(self, "z0", _frac(self.z0))
        if not isinstance(self.phi, RationalPoly):
            object.__setattr__(self, "phi", RationalPoly(self.phi))
        if self.m < 1:
            raise GermError(f"covering degree must be >= 1, got {self.m}")

    def is_reduced(self) -> bool:
        g = self.m
        for e, c in enumerate(self.phi.coeffs):
            if e >= 1 and c != 0:
                g = gcd(g, e)
        return g == 1

    @property
    def value_at_base(self) -> Fraction:
        """``phi(0)``, the ``w`` coordinate where the branch meets the line."""
        return self.phi.coeff(0)

    def is_smooth(self) -> bool:
        if self.m == 1:
            return True
        return any(c != 0 for c in self.phi.coeffs[1:2])

    def to_json(self) -> dict:
        return {"m": self.m, "phi": self.phi.to_json()}


@dataclass(frozen=True)
class CurveGerm:
    z0: Fraction
    vertical_mult: int = 0
    branches: tuple[BranchGerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "z0", _frac(self.z0))
        object.__setattr__(self, "branches", tuple(self.branches))
        if self.vertical_mult < 0:
            raise GermError("vertical multiplicity must be nonnegative")
        for b in self.branches:
            if b.z0 != self.z0:
                raise GermError(f"branch based at {b.z0}, germ at {self.z0}")

    @property
    def branch_degree(self) -> int:
        return sum(b.m for b in self.branches)

    def to_json(self) -> dict:
        z0 = self.z0
        return {
            "z0": f"{z0.numerator}/{z0.denominator}",
            "vertical_mult": self.vertical_mult,
            "branches": [b.to_json() for b in self.branches],
        }

    @classmethod
    def from_json(cls, data) -> "CurveGerm":
        if not isinstance(data, dict):
            raise GermError("curve germ JSON must be an object")
        try:
            z0 = _frac(data.get("z0", 0))
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise GermError(f"bad z0: {exc}") from None
        vm = data.get("vertical_mult", 0)
        if not isinstance(vm, int) or isinstance(vm, bool):
            raise GermError('"vertical_mult" must be an integer')
        branches = []
        for item in data.get("branches", []):
            if not isinstance(item, dict) or "m" not in item or "phi" not in item:
                raise GermError('each branch needs "m" and "phi"')
            m = item["m"]
            if not isinstance(m, int) or isinstance(m, bool):
                raise GermError('branch "m" must be an integer')
            try:
                phi = RationalPoly.from_json(item["phi"])
            except PolyError as exc:
                raise GermError(str(exc)) from None
            branches.append(BranchGerm(z0, m, phi))
        return cls(z0, vm, tuple(branches))


# ---------------------------------------------------------------------------
# implicitization and per-branch invariants


def _newton_elementary(power_sums: Sequence[RationalPoly]) -> list[RationalPoly]:
    """Elementary symmetric functions from power sums ``p_1..p_n``."""
    e = [ONE]
    for k in range(1, len(power_sums) + 1):
        acc = ZERO
        for i in range(1, k + 1):
            term = e[k - i] * power_sums[i - 1]
            acc = acc + term if i % 2 else acc - term
        e.append(acc.scale(Fraction(1, k)))
    return e


def branch_to_weierstrass(b: BranchGerm) -> WeierstrassPoly:
    """Monic degree-``m`` polynomial in ``w`` cutting out the branch.

    This is the norm ``prod_{zeta^m = 1} (w - phi(zeta t))`` with
    ``t^m = z - z0``, i.e. the eliminant of ``t`` from
    ``z - z0 - t^m = 0, w - phi(t) = 0``.  Power sums of the conjugates keep
    only the exponents divisible by ``m``; Newton's identities give the
    coefficients.
    """
    if not b.is_reduced():
        raise GermError(
            f"non-reduced branch: phi is a polynomial in a proper power of t dividing m={b.m}"
        )
    m = b.m
    sums = []
    power = ONE
    for _ in range(m):
        power = power * b.phi
        kept = [Fraction(0)] * (power.degree // m + 1) if not power.is_zero else []
        for e, c in enumerate(power.coeffs):
            if e % m == 0:
                kept[e // m] = c * m
        sums.append(RationalPoly(kept))
    elem = _newton_elementary(sums)
    # P = sum_k (-1)^k e_k w^(m-k), coefficients in u = z - z0
    a = []
    for k in range(m + 1):
        coeff = elem[k] if k % 2 == 0 else -elem[k]
        a.append(coeff.shift(-b.z0))
    return WeierstrassPoly(m, tuple(a))


def branch_delta(b: BranchGerm) -> int:
    """delta of one branch from ``ord Dscr = 2 delta + m - 1``."""
    P = branch_to_weierstrass(b)
    n = ord_at(discriminant(P), b.z0)
    excess = n - (b.m - 1)
    if excess < 0 or excess % 2:
        raise ConsistencyError(
            f"discriminant order {n} incompatible with covering degree {b.m}"
        )
    return excess // 2


def pairwise_delta(b1: BranchGerm, b2: BranchGerm) -> int:
    """Local intersection index of two branches at their common base line."""
    if b1.z0 != b2.z0:
        raise GermError("branches must share the base point")
    P1, P2 = branch_to_weierstrass(b1), branch_to_weierstrass(b2)
    res = resultant(P1.w_coeffs(), P2.w_coeffs())
    if res.is_zero:
        raise GermError("identical branches: intersection index is infinite")
    return ord_at(res, b1.z0)


# ---------------------------------------------------------------------------
# whole germs


@dataclass(frozen=True)
class DeltaReport:
    delta_total: int
    per_branch: tuple[int, ...]
    pairwise: tuple[tuple[int, ...], ...]
    vertical_term: int
    ord_dscr: int
    euler_char: int
    d: int
    b: int
    vertical_mult: int
    extra_sheets: int = 0
    euler_identity: bool | None = None
    branching_identity: bool | None = None

    @property
    def delta_branches(self) -> int:
        """delta of the non-vertical part (branch deltas plus intersections)."""
        return self.delta_total - self.vertical_term

    def to_json(self) -> dict:
        return {
            "delta_total": self.delta_total,
            "per_branch": list(self.per_branch),
            "pairwise": [list(r) for r in self.pairwise],
            "vertical_term": self.vertical_term,
            "ord_dscr": self.ord_dscr,
            "euler_char": self.euler_char,
            "d": self.d,
            "b": self.b,
            "vertical_mult": self.vertical_mult,
            "extra_sheets": self.extra_sheets,
            "checks": {
                "ord_dscr == d - euler_char + 2*delta": self.euler_identity,
                "ord_dscr == d - b + 2*(delta_branches + m*(d-1))": self.branching_identity,
            },
        }


def _resolve_degree(c: CurveGerm, d_total: int | None) -> tuple[int, int]:
    d = c.branch_degree if d_total is None else d_total
    extra = d - c.branch_degree
    if extra < 0:
        raise GermError(
            f"d_total={d} is smaller than the covering degree {c.branch_degree} of the branches"
        )
    return d, extra


def _extra_sheet_values(c: CurveGerm, extra: int) -> list[Fraction]:
    top = max((b.value_at_base for b in c.branches), default=Fraction(0))
    return [top + k for k in range(1, extra + 1)]


def assemble_polynomial(c: CurveGerm, d_total: int | None = None) -> WeierstrassPoly:
    """``(z - z0)^m * prod P_branch * prod (w - c_s)`` for the implicit extra sheets."""
    d, extra = _resolve_degree(c, d_total)
    P = WeierstrassPoly(0, (ONE,))
    for b in c.branches:
        P = P * branch_to_weierstrass(b)
    for value in _extra_sheet_values(c, extra):
        P = P * WeierstrassPoly(1, (ONE, RationalPoly.const(-value)))
    if c.vertical_mult:
        P = P * (RationalPoly.linear_root(c.z0) ** c.vertical_mult)
    return P


def curve_delta(c: CurveGerm, d_total: int | None = None, strict: bool = True) -> DeltaReport:
    """Assemble the delta invariant of a germ and check it against the discriminant.

    ``d_total`` is the fibre degree of the enclosing curve.  Sheets beyond the
    listed branches are smooth graphs meeting the line at distinct points away
    from the branches; they only enter through ``d`` and the branch count.
    With ``strict`` a failed identity raises :class:`ConsistencyError`.
    """
    d, extra = _resolve_degree(c, d_total)
    bs = c.branches
    per_branch = tuple(branch_delta(b) for b in bs)
    n = len(bs)
    pair = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = pairwise_delta(bs[i], bs[j])
            pair[i][j] = pair[j][i] = v
    m = c.vertical_mult
    vertical_term = d * m
    delta_dag = sum(per_branch) + sum(pair[i][j] for i in range(n) for j in range(i + 1, n))
    delta = vertical_term + delta_dag
    b = n + extra
    chi = b + 2 * m
    if d == 0:
        # pure vertical divisor: no fibre variable, no discriminant
        return DeltaReport(
            delta_total=delta, per_branch=per_branch, pairwise=tuple(map(tuple, pair)),
            vertical_term=vertical_term, ord_dscr=0, euler_char=chi, d=d, b=b,
            vertical_mult=m, extra_sheets=extra,
        )
    P = assemble_polynomial(c, d)
    ord_dscr = ord_at(discriminant(P), c.z0)
    euler_ok = ord_dscr == d - chi + 2 * delta
    branching_ok = ord_dscr == d - b + 2 * (delta_dag + m * (d - 1))
    report = DeltaReport(
        delta_total=delta,
        per_branch=per_branch,
        pairwise=tuple(map(tuple, pair)),
        vertical_term=vertical_term,
        ord_dscr=ord_dscr,
        euler_char=chi,
        d=d,
        b=b,
        vertical_mult=m,
        extra_sheets=extra,
        euler_identity=euler_ok,
        branching_identity=branching_ok,
    )
    if strict and not (euler_ok and branching_ok):
        raise ConsistencyError(f"discriminant order identity failed: {report.to_json()}")
    return report


# ---------------------------------------------------------------------------
# delta along every vertical line of a polynomial


def _branch_on_curve(P: WeierstrassPoly, b: BranchGerm, jet_order: int) -> str | None:
    """``"exact"`` if ``P(z0 + t^m, phi(t)) == 0``, ``"jet"`` if it vanishes to
    order ``>= jet_order`` in ``t``, otherwise ``None``."""
    z_of_t = RationalPoly.monomial(b.m) + b.z0
    val = ZERO
    for coeff in P.a:
        val = val * b.phi + coeff(z_of_t)
    if val.is_zero:
        return "exact"
    if val.low_order() >= jet_order:
        return "jet"
    return None


def classify_double_zero(c: CurveGerm, report: DeltaReport) -> str:
    """Which configuration produces a double zero of the discriminant at the line."""
    bs = c.branches
    singular = [b for b, dj in zip(bs, report.per_branch) if dj > 0]
    meets = sum(1 for i in range(len(bs)) for j in range(i + 1, len(bs)) if report.pairwise[i][j])
    ramified = [b for b in bs if b.m > 1]
    if report.vertical_mult == 1 and report.d == 2 and not meets and not ramified:
        return "vertical-component"
    if report.vertical_mult == 0 and not singular:
        if meets == 1 and not ramified:
            return "node"
        if not meets and len(ramified) == 1 and ramified[0].m == 3:
            return "vertical-inflection"
        if not meets and len(ramified) == 2 and all(b.m == 2 for b in ramified):
            return "double-tangency"
    return "other"


@dataclass(frozen=True)
class LineDeltas:
    per_line: dict[Fraction, int]
    total: int
    tags: dict[Fraction, str]
    containment: dict[Fraction, list[str]]
    unresolved: tuple[RationalPoly, ...]
    global_check: bool | None = None

    def to_json(self) -> dict:
        fmt = lambda z: f"{z.numerator}/{z.denominator}"
        return {
            "per_line": {fmt(z): v for z, v in sorted(self.per_line.items())},
            "total": self.total,
            "tags": {fmt(z): v for z, v in sorted(self.tags.items())},
            "containment": {fmt(z): v for z, v in sorted(self.containment.items())},
            "unresolved": [p.to_json() for p in self.unresolved],
            "global_check": self.global_check,
        }


def delta_per_line(
    P: WeierstrassPoly,
    germs: Mapping,
    euler_char: int | None = None,
) -> LineDeltas:
    """delta at each rational zero of the discriminant (and each vertical line).

    Irrational zeros are returned as ``unresolved`` square-free factors and
    contribute nothing to ``total``.  When ``euler_char`` (of the normalisation
    of the whole curve) is supplied and nothing is unresolved, the global
    identity ``deg Dscr = d - chi + 2 delta`` is checked.
    """
    germs = {_frac(k): v for k, v in germs.items()}
    vertical, _rest = factor_vertical(P)
    D = discriminant(P)
    if D.is_zero:
        raise GermError("discriminant vanishes identically (multiple non-vertical component)")
    roots, leftover = linear_factor_split(D)
    vroots, vleft = linear_factor_split(vertical)
    unresolved = []
    if leftover.degree >= 1:
        unresolved.append(leftover)
    if vleft.degree >= 1 and vleft not in unresolved:
        unresolved.append(vleft)
    lines = sorted({r for r, _ in roots} | {r for r, _ in vroots})
    per_line: dict[Fraction, int] = {}
    tags: dict[Fraction, str] = {}
    containment: dict[Fraction, list[str]] = {}
    for z0 in lines:
        if z0 not in germs:
            raise GermMismatchError(f"no germ supplied for the discriminant zero z = {z0}")
        germ = germs[z0]
        if germ.z0 != z0:
            raise GermMismatchError(f"germ keyed at {z0} is based at {germ.z0}")
        n = ord_at(D, z0)
        vm = ord_at(vertical, z0)
        if germ.vertical_mult != vm:
            raise GermMismatchError(
                f"vertical multiplicity at {z0}: germ says {germ.vertical_mult}, polynomial has {vm}"
            )
        report = curve_delta(germ, P.d)
        if report.ord_dscr != n:
            raise GermMismatchError(
                f"discriminant order at {z0}: germ predicts {report.ord_dscr}, polynomial has {n}"
            )
        kinds = []
        for b in germ.branches:
            kind = _branch_on_curve(P, b, b.m * (n + 1))
            if kind is None:
                raise GermMismatchError(f"branch {b.to_json()} does not lie on the curve at z = {z0}")
            kinds.append(kind)
        containment[z0] = kinds
        if report.delta_total:
            per_line[z0] = report.delta_total
        if n == 2:
            tags[z0] = classify_double_zero(germ, report)
    extra = set(germs) - set(lines)
    for z0 in extra:
        if germs[z0].branches or germs[z0].vertical_mult:
            report = curve_delta(germs[z0], P.d)
            if report.delta_total or report.ord_dscr:
                raise GermMismatchError(f"germ at {z0} is singular but the discriminant does not vanish there")
    total = sum(per_line.values())
    check = None
    if euler_char is not None and not unresolved and P.d >= 1:
        check = D.degree == P.d - euler_char + 2 * total
    return LineDeltas(per_line, total, tags, containment, tuple(unresolved), check)


# ---------------------------------------------------------------------------
# equisingular codimension


@dataclass(frozen=True)
class CodimReport:
    codim: int
    case: str  # "i", "ii", "ii-tangent", "iii", "general-lower-bound"
    exact: bool
    delta_star: int
    m_star: int
    d: int
    b0: int

    def to_json(self) -> dict:
        return {
            "codim": self.codim,
            "case": self.case,
            "exact": self.exact,
            "delta_star": self.delta_star,
            "m_star": self.m_star,
            "d": self.d,
            "b0": self.b0,
        }


def equisingular_codim(c: CurveGerm, d_total: int | None = None) -> CodimReport:
    """Codimension of the equisingular stratum of the germ at its vertical line.

    ``b0`` counts all local non-vertical components at the line, implicit extra
    sheets included, so ``d - b0 = sum (m_j - 1)``.  Cases:

    i    smooth, pairwise disjoint branches: ``delta + m + (d - b0)``
    ii   smooth branches, exactly one meeting pair: ``+1``; when both are
         graphs (m = 1) tangent to each other only a lower bound ``+2`` is
         claimed (tag ``ii-tangent``)
    iii  disjoint branches, exactly one singular and it is an ordinary cusp
         (delta_j = 1): ``+1``
    otherwise the lower bound ``+2``.
    """
    r = curve_delta(c, d_total)
    base = r.delta_total + r.vertical_mult + (r.d - r.b)
    bs = c.branches
    n = len(bs)
    meeting = [(i, j) for i in range(n) for j in range(i + 1, n) if r.pairwise[i][j] > 0]
    singular = [i for i in range(n) if r.per_branch[i] > 0]

    def out(codim, case, exact):
        return CodimReport(codim, case, exact, r.delta_total, r.vertical_mult, r.d, r.b)

    if not singular and not meeting:
        return out(base, "i", True)
    if not singular and len(meeting) == 1:
        i, j = meeting[0]
        if bs[i].m == 1 and bs[j].m == 1 and r.pairwise[i][j] >= 2:
            return out(base + 2, "ii-tangent", False)
        return out(base + 1, "ii", True)
    if not meeting and len(singular) == 1 and r.per_branch[singular[0]] == 1:
        return out(base + 1, "iii", True)
    return out(base + 2, "general-lower-bound", False)


# ---------------------------------------------------------------------------
# jet correction


def jet_correct(
    points: Sequence[tuple],
    jets: Sequence[RationalPoly],
    G: RationalPoly,
) -> tuple[RationalPoly, RationalPoly]:
    """Correct the jets of ``G`` at distinct points by the lowest-degree polynomial.

    ``points`` are ``(zeta_i, m_i)``; ``jets[i]`` is a polynomial of degree
    ``< m_i`` in the local variable ``z - zeta_i``.  Returns ``(H, q)`` with
    ``H = G + q``, ``deg q < sum m_i``, and the ``(m_i - 1)``-jet of ``H`` at
    ``zeta_i`` equal to ``jets[i]``.  Coincident points must be merged by the
    caller into one point carrying the combined jet.
    """
    if len(points) != len(jets):
        raise GermError("need one jet per point")
    G = G if isinstance(G, RationalPoly) else RationalPoly(G)
    seen = set()
    q, modulus = ZERO, ONE
    for (zeta, m), jet in zip(points, jets):
        zeta = _frac(zeta)
        jet = jet if isinstance(jet, RationalPoly) else RationalPoly(jet)
        if m < 1:
            raise GermError("jet orders must be positive")
        if zeta in seen:
            raise GermError(
                f"duplicate point {zeta}: merge coincident jets into a single higher-order jet"
            )
        seen.add(zeta)
        if jet.degree > m - 1:
            raise GermError(f"jet at {zeta} has degree {jet.degree} > m - 1 = {m - 1}")
        local_mod = RationalPoly.linear_root(zeta) ** m
        target = (jet.shift(-zeta) - G) % local_mod
        # CRT step: q' = q + modulus * k with k = (target - q) * modulus^-1 mod local_mod
        g, s, _ = poly_xgcd(modulus, local_mod)
        if g != ONE:
            raise ConsistencyError("moduli are not coprime")
        k = ((target - q) * s) % local_mod
        q = q + modulus * k
        modulus = modulus * local_mod
    if not modulus.is_constant():
        q = q % modulus
    return G + q, q


def jet_at(p: RationalPoly, zeta, m: int) -> RationalPoly:
    """Taylor polynomial of ``p`` at ``zeta`` to order ``m - 1`` in ``z - zeta``."""
    return p.shift(zeta).truncate(m)
