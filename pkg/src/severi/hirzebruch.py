"""Curves of class ``d*C0 + f*F`` on the Hirzebruch surface ``F_k`` and their
maximally degenerate nodal model.

The degenerate curve is a union of ``d`` sections ``w = p_j(z)`` (degree ``<= k``)
and ``f`` fibres ``z = z_i``.  Two sections meet in ``k`` points, a fibre meets
every section once, so there are ``k*d(d-1)/2 + d*f`` nodes.  Smoothing a set
of nodes gives a curve whose genus is the first Betti number of the chosen
subgraph of the dual multigraph.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Sequence

from .patterns import pattern_of
from .polyalg import (
    PolyError,
    RationalPoly,
    WeierstrassPoly,
    _frac,
    poly_gcd,
    rational_roots,
)

DEFAULT_MAX_EDGES = 16


class ModelError(ValueError):
    """Invalid class or section/fibre data."""


def max_edges_from_env() -> int:
    raw = os.environ.get("SEVERI_MAX_EDGES", "")
    if not raw:
        return DEFAULT_MAX_EDGES
    try:
        value = int(raw)
    except ValueError:
        raise ModelError(f"SEVERI_MAX_EDGES must be an integer, got {raw!r}") from None
    if value < 1:
        raise ModelError("SEVERI_MAX_EDGES must be positive")
    return value


@dataclass(frozen=True)
class HirzebruchClass:
    k: int
    d: int
    f: int

    def __post_init__(self):
        for name in ("k", "d", "f"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ModelError(f"{name} must be an integer")
        if self.k < 0:
            raise ModelError("k must be nonnegative")
        if self.d < 1:
            raise ModelError("d must be at least 1")
        if self.f < 0:
            raise ModelError("f must be nonnegative")
        if self.k == 0 and self.f < 1:
            raise ModelError("on F_0 the class needs f >= 1")

    @property
    def node_count(self) -> int:
        return self.k * comb(self.d, 2) + self.d * self.f

    def to_json(self) -> dict:
        return {"k": self.k, "d": self.d, "f": self.f}


def genus_max(klass: HirzebruchClass) -> int:
    """Arithmetic genus ``k*d(d-1)/2 + (d-1)(f-1)`` of the class."""
    return klass.k * comb(klass.d, 2) + (klass.d - 1) * (klass.f - 1)


# ---------------------------------------------------------------------------
# nodes and components


@dataclass(frozen=True, order=True)
class Node:
    """``fs`` = fibre ``i`` meets section ``j``; ``ss`` = slot ``l`` of sections ``i < j``."""

    kind: str
    i: int
    j: int
    l: int = 0

    @property
    def label(self) -> str:
        if self.kind == "fs":
            return f"fs({self.i},{self.j})"
        return f"ss({self.i},{self.j},{self.l})"

    @property
    def components(self) -> tuple[str, str]:
        if self.kind == "fs":
            return (f"F{self.i}", f"C{self.j}")
        return (f"C{self.i}", f"C{self.j}")

    def to_json(self) -> dict:
        if self.kind == "fs":
            return {"type": "fs", "i": self.i, "j": self.j}
        return {"type": "ss", "i": self.i, "j": self.j, "l": self.l}

    @classmethod
    def from_json(cls, data) -> "Node":
        if not isinstance(data, dict) or data.get("type") not in ("fs", "ss"):
            raise ModelError(f"bad node: {data!r}")
        try:
            if data["type"] == "fs":
                return cls("fs", int(data["i"]), int(data["j"]))
            return cls("ss", int(data["i"]), int(data["j"]), int(data["l"]))
        except (KeyError, TypeError, ValueError):
            raise ModelError(f"bad node: {data!r}") from None

    def __str__(self) -> str:
        return self.label


def parse_node(text: str) -> Node:
    """Inverse of :attr:`Node.label`."""
    t = text.strip().replace(" ", "")
    try:
        if t.startswith("fs(") and t.endswith(")"):
            i, j = (int(x) for x in t[3:-1].split(","))
            return Node("fs", i, j)
        if t.startswith("ss(") and t.endswith(")"):
            i, j, l = (int(x) for x in t[3:-1].split(","))
            return Node("ss", i, j, l)
    except ValueError:
        pass
    raise ModelError(f"cannot parse node label {text!r}")


@dataclass(frozen=True)
class DegenerateModel:
    klass: HirzebruchClass
    sections: tuple[RationalPoly, ...]
    fibers: tuple[Fraction, ...]
    nodes: tuple[Node, ...]
    slot_roots: dict = field(default_factory=dict, compare=False, hash=False)
    perturbation: tuple[Fraction, ...] | None = field(default=None, compare=False, hash=False)

    @property
    def k(self) -> int:
        return self.klass.k

    @property
    def d(self) -> int:
        return self.klass.d

    @property
    def f(self) -> int:
        return self.klass.f

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(f"C{j}" for j in range(1, self.d + 1)) + tuple(
            f"F{i}" for i in range(1, self.f + 1)
        )

    def node_index(self) -> dict[Node, int]:
        return {n: idx for idx, n in enumerate(self.nodes)}

    def to_json(self) -> dict:
        fmt = lambda x: f"{x.numerator}/{x.denominator}"
        out = {
            "k": self.k,
            "d": self.d,
            "f": self.f,
            "sections": [p.to_json() for p in self.sections],
            "fibers": [fmt(z) for z in self.fibers],
            "nodes": [n.to_json() for n in self.nodes],
        }
        if self.perturbation is not None:
            out["perturbation"] = [fmt(b) for b in self.perturbation]
        return out

    @classmethod
    def from_json(cls, data) -> "DegenerateModel":
        if not isinstance(data, dict):
            raise ModelError("model JSON must be an object")
        try:
            klass = HirzebruchClass(data["k"], data["d"], data["f"])
            sections = [RationalPoly.from_json(s) for s in data["sections"]]
            fibers = [_frac(z) for z in data.get("fibers", [])]
        except (KeyError, TypeError, PolyError, ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"bad model JSON: {exc}") from None
        model = build_cx(klass, sections, fibers)
        if "nodes" in data:
            given = sorted(Node.from_json(n) for n in data["nodes"])
            if given != sorted(model.nodes):
                raise ModelError("node inventory in JSON does not match the sections and fibres")
        return model


def _check_sections(klass: HirzebruchClass, sections: Sequence[RationalPoly]):
    k, d = klass.k, klass.d
    if len(sections) != d:
        raise ModelError(f"need {d} section polynomials, got {len(sections)}")
    for j, p in enumerate(sections, 1):
        if p.degree > k:
            raise ModelError(f"section {j} has degree {p.degree} > k = {k}")
    diffs = {}
    for i, j in itertools.combinations(range(d), 2):
        q = sections[i] - sections[j]
        if q.is_zero:
            raise ModelError(f"coincident sections {i + 1} and {j + 1}")
        if q.degree != k:
            raise ModelError(
                f"sections {i + 1} and {j + 1} meet at the section at infinity "
                f"(difference has degree {q.degree} < k = {k})"
            )
        report = pattern_of(q.monic())
        if any(part > 1 for part in report.pattern.parts):
            raise ModelError(
                f"sections {i + 1} and {j + 1} are tangent (intersection pattern {report.pattern})"
            )
        diffs[(i + 1, j + 1)] = q
    for a, b, c in itertools.combinations(range(1, d + 1), 3):
        if poly_gcd(diffs[(a, b)], diffs[(a, c)]).degree >= 1:
            raise ModelError(f"sections {a}, {b}, {c} pass through a common point")
    return diffs


def build_cx(
    klass: HirzebruchClass,
    sections: Sequence,
    fiber_points: Sequence,
) -> DegenerateModel:
    """Validate the data of a maximally nodal degenerate curve and list its nodes.

    Requirements: sections pairwise meet transversally in ``k`` affine points,
    no three sections are concurrent, fibre points are distinct and avoid all
    section-section nodes.  Slot ``l`` of a section pair is the ``l``-th
    rational root in increasing order when all roots are rational; otherwise
    slots are abstract labels of the ``k`` simple roots.
    """
    sections = tuple(s if isinstance(s, RationalPoly) else RationalPoly(s) for s in sections)
    fibers = tuple(_frac(z) for z in fiber_points)
    if len(fibers) != klass.f:
        raise ModelError(f"need {klass.f} fibre points, got {len(fibers)}")
    if len(set(fibers)) != len(fibers):
        raise ModelError("fibre points must be distinct")
    diffs = _check_sections(klass, sections)
    slot_roots = {}
    for (i, j), q in diffs.items():
        for z in fibers:
            if q(z) == 0:
                raise ModelError(f"fibre z = {z} passes through a node of sections {i} and {j}")
        roots = sorted(rational_roots(q))
        slot_roots[(i, j)] = roots if len(roots) == klass.k else None
    nodes = [Node("fs", i, j) for i in range(1, klass.f + 1) for j in range(1, klass.d + 1)]
    nodes += [
        Node("ss", i, j, l)
        for i, j in itertools.combinations(range(1, klass.d + 1), 2)
        for l in range(1, klass.k + 1)
    ]
    nodes.sort()
    if len(nodes) != klass.node_count:
        raise AssertionError("node inventory does not match the node-count formula")
    return DegenerateModel(klass, sections, fibers, tuple(nodes), slot_roots)


def default_model(klass: HirzebruchClass, seed: int = 0) -> DegenerateModel:
    """Sections ``p_j = j*z^k + beta_j`` with seeded distinct integer shifts.

    The monomials ``j*z^k`` alone all meet at ``z = 0``; the shifts separate
    the intersection points.  Retries until the data is maximally nodal.
    """
    rng = random.Random(seed)
    k, d, f = klass.k, klass.d, klass.f
    span = 10 * (d + f + k + 1)
    for _ in range(1000):
        betas = rng.sample(range(-span, span + 1), d)
        sections = [RationalPoly.monomial(k, j) + betas[j - 1] if k else RationalPoly.const(betas[j - 1])
                    for j in range(1, d + 1)]
        fibers = sorted(rng.sample(range(-span, span + 1), f))
        try:
            model = build_cx(klass, sections, fibers)
        except ModelError:
            continue
        return DegenerateModel(
            model.klass, model.sections, model.fibers, model.nodes, model.slot_roots,
            perturbation=tuple(Fraction(b) for b in betas),
        )
    raise ModelError("could not find maximally nodal sections (retry limit)")


# ---------------------------------------------------------------------------
# toric degeneration


def _check_linear_system(P: WeierstrassPoly, k: int, f: int):
    for i, a in enumerate(P.a):
        if a.degree > f + i * k:
            raise ModelError(
                f"not in linear system d·C₀ + f·F: deg a_{i} = {a.degree} > f + i*k = {f + i * k}"
            )


def toric_degenerate(P: WeierstrassPoly, lam, k: int, f: int) -> WeierstrassPoly:
    """Coefficients ``lam^-(f+i*k) * a_i(lam*z)`` of the torus-translated curve."""
    lam = _frac(lam)
    if lam == 0:
        raise ModelError("toric parameter must be nonzero")
    _check_linear_system(P, k, f)
    out = []
    for i, a in enumerate(P.a):
        e = f + i * k
        coeffs = [c * lam ** (n - e) for n, c in enumerate(a.coeffs)]
        out.append(RationalPoly(coeffs))
    return WeierstrassPoly(P.d, tuple(out))


@dataclass(frozen=True)
class ToricLimit:
    """Limit of the torus orbit: fibre ``z = 0`` with multiplicity, plus sections."""

    limit: WeierstrassPoly
    slopes: tuple[Fraction, ...]
    irrational_slope_factor: RationalPoly | None
    infinity_section: bool
    fiber_multiplicity: int


def fiber_multiplicity(f: int, k: int, infinity_section: bool) -> int:
    """Multiplicity of the special fibre in the limit: ``f + k`` with ``C_inf``, else ``f``."""
    return f + k if infinity_section else f


def toric_limit(P: WeierstrassPoly, k: int, f: int) -> ToricLimit:
    """Keep the top admissible monomial ``c_i z^(f+i*k)`` of each coefficient.

    This is the limit of ``toric_degenerate(P, lam)`` as ``1/lam -> 0``.  It
    factors as ``z^f * prod_j (w - alpha_j z^k)`` (times ``z^k`` when the
    section at infinity splits off), where ``alpha_j`` are the roots of
    ``sum_i c_i Y^(d-i)``.
    """
    _check_linear_system(P, k, f)
    top = [a.coeff(f + i * k) for i, a in enumerate(P.a)]
    limit = WeierstrassPoly(
        P.d, tuple(RationalPoly.monomial(f + i * k, c) for i, c in enumerate(top))
    )
    slope_poly = RationalPoly(list(reversed(top)))  # ascending in Y: sum c_i Y^(d-i)
    infinity = top[0] == 0
    if slope_poly.is_zero:
        raise ModelError("all top coefficients vanish: limit is not a curve of the class")
    roots = rational_roots(slope_poly)
    rest = slope_poly
    for r in roots:
        while rest(r) == 0 and rest.degree >= 1:
            rest = rest // RationalPoly.linear_root(r)
    slopes = []
    for r in sorted(set(roots)):
        mult = 0
        q = slope_poly
        while q.degree >= 1 and q(r) == 0:
            q = q // RationalPoly.linear_root(r)
            mult += 1
        slopes.extend([r] * mult)
    irr = rest.monic() if rest.degree >= 1 else None
    return ToricLimit(limit, tuple(slopes), irr, infinity, fiber_multiplicity(f, k, infinity))


# ---------------------------------------------------------------------------
# dual graph, smoothings, spanning trees


@dataclass(frozen=True)
class DualGraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[Node, str, str], ...]

    def adjacency(self) -> dict[str, dict[str, int]]:
        adj = {v: {} for v in self.vertices}
        for _, u, v in self.edges:
            adj[u][v] = adj[u].get(v, 0) + 1
            adj[v][u] = adj[v].get(u, 0) + 1
        return adj

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"node": n.label, "ends": [u, v]} for n, u, v in self.edges],
            "adjacency": {u: dict(sorted(nb.items())) for u, nb in self.adjacency().items()},
        }


def dual_graph(model: DegenerateModel) -> DualGraph:
    edges = tuple((n, *n.components) for n in model.nodes)
    return DualGraph(model.components, edges)


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


@dataclass(frozen=True)
class SmoothingSet:
    model: DegenerateModel
    chosen: frozenset

    def __post_init__(self):
        chosen = frozenset(self.chosen)
        object.__setattr__(self, "chosen", chosen)
        unknown = chosen - set(self.model.nodes)
        if unknown:
            raise ModelError(f"nodes not in the model: {sorted(n.label for n in unknown)}")

    def labels(self) -> list[str]:
        return [n.label for n in sorted(self.chosen)]


@dataclass(frozen=True)
class SmoothingAnalysis:
    irreducible: bool
    genus: int | None
    components: tuple[tuple[str, ...], ...]

    def to_json(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "genus": self.genus,
            "components": [list(c) for c in self.components],
        }


def smoothing_analysis(s: SmoothingSet) -> SmoothingAnalysis:
    """Connected components of the smoothed curve and its genus when irreducible."""
    verts = s.model.components
    uf = _UnionFind(verts)
    for n in s.chosen:
        uf.union(*n.components)
    groups: dict[str, list[str]] = {}
    for v in verts:
        groups.setdefault(uf.find(v), []).append(v)
    comps = tuple(sorted(tuple(g) for g in groups.values()))
    irreducible = len(comps) == 1
    genus = len(s.chosen) - len(verts) + 1 if irreducible else None
    return SmoothingAnalysis(irreducible, genus, comps)


def is_spanning_tree(model: DegenerateModel, chosen: Iterable[Node]) -> bool:
    chosen = list(chosen)
    if len(chosen) != len(model.components) - 1:
        return False
    uf = _UnionFind(model.components)
    return all(uf.union(*n.components) for n in chosen)


def spanning_trees(model: DegenerateModel) -> Iterator[frozenset]:
    """All spanning trees as node sets, in lexicographic order of sorted nodes."""
    verts = model.components
    need = len(verts) - 1
    for combo in itertools.combinations(model.nodes, need):
        uf = _UnionFind(verts)
        if all(uf.union(*n.components) for n in combo):
            yield frozenset(combo)


def count_spanning_trees_brute(model: DegenerateModel) -> int:
    return sum(1 for _ in spanning_trees(model))


def _det_fraction(mat: list[list[Fraction]]) -> Fraction:
    n = len(mat)
    a = [row[:] for row in mat]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            if a[r][c]:
                factor = a[r][c] / a[c][c]
                a[r] = [x - factor * y for x, y in zip(a[r], a[c])]
    return det


def matrix_tree_count(model: DegenerateModel) -> int:
    """Kirchhoff: any cofactor of the Laplacian of the dual multigraph."""
    verts = model.components
    idx = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    lap = [[Fraction(0)] * n for _ in range(n)]
    for node in model.nodes:
        u, v = (idx[c] for c in node.components)
        lap[u][u] += 1
        lap[v][v] += 1
        lap[u][v] -= 1
        lap[v][u] -= 1
    if n == 1:
        return 1
    minor = [row[1:] for row in lap[1:]]
    det = _det_fraction(minor)
    if det.denominator != 1:
        raise AssertionError("Laplacian cofactor is not an integer")
    return int(det)


def count_rational_smoothings(model: DegenerateModel, max_edges: int | None = None) -> int:
    """Number of spanning trees of the dual graph.

    Brute-force enumeration when the graph has at most ``max_edges`` edges
    (default from ``SEVERI_MAX_EDGES``), the matrix-tree determinant above.
    """
    if max_edges is None:
        max_edges = max_edges_from_env()
    if len(model.nodes) <= max_edges:
        return count_spanning_trees_brute(model)
    return matrix_tree_count(model)


# ---------------------------------------------------------------------------
# genus-g base curves: counts of rank-two subbundles


@dataclass(frozen=True)
class SectionCount:
    genus: int
    count: int
    monodromy_order: int | None
    order_inferred: bool
    delta_check: int | None

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "count": self.count,
            "monodromy_order": self.monodromy_order,
            "order_inferred": self.order_inferred,
            "delta_check": self.delta_check,
        }


_SECTION_TABLE = {0: 1, 1: 2, 2: 4, 3: 8}


def planar_delta(g: int) -> int:
    """``(3g-4)(3g-5)/2 - g``: nodes of the plane model of degree ``3g - 4``."""
    return (3 * g - 4) * (3 * g - 5) // 2 - g


def section_count(g: int) -> SectionCount:
    """Number of maximal subbundles for a base curve of genus ``g <= 3``.

    For ``g = 3`` the count is one more than the number of nodes of the plane
    quintic model, which is returned as ``delta_check``.  At ``g = 2`` the same
    formula is negative and no check is returned.  The order for ``g = 1`` is
    that of the swap of the two curves, flagged as inferred.
    """
    if g not in _SECTION_TABLE:
        raise ModelError(f"genus {g}: not derived (counts are tabulated only for 0 <= g <= 3)")
    count = _SECTION_TABLE[g]
    if g == 0:
        order, inferred = None, False
    elif g == 1:
        order, inferred = 2, True
    else:
        order, inferred = factorial(count), False
    check = planar_delta(g) if g == 3 else None
    return SectionCount(g, count, order, inferred, check)

