"""Monodromy of the node set of the degenerate model.

Permutations act on node labels.  Three sources of monodromy are modelled:

* the base group: reordering intersection slots of each section pair,
  relabelling sections and relabelling fibres;
* triangle transpositions (k >= 1): a smoothed node ``s`` joining components
  ``A`` and ``B`` and a third component ``C`` give the transposition of a free
  node on ``C∩A`` with a free node on ``C∩B``;
* rectangle transpositions (k = 0): two sections and two fibres form a
  4-cycle; if one side is smoothed and the opposite side is free, the two
  opposite nodes are swapped.

When one of the two swapped nodes is itself smoothed the same constellation
moves the smoothing (a *rewrite*).  Rewrites connect spanning trees, and
transpositions found at another tree are transported back along the chain.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from sympy.combinatorics import Permutation as _SymPerm
from sympy.combinatorics import PermutationGroup as _SymGroup

from .hirzebruch import (
    DegenerateModel,
    Node,
    SmoothingSet,
    is_spanning_tree,
    smoothing_analysis,
    spanning_trees,
)


class MonodromyError(ValueError):
    """Invalid request (wrong move family for k, tree that is not spanning, ...)."""


class ConcentrationStuck(RuntimeError):
    """No rewrite chain reaches the concentrated form."""

    def __init__(self, message: str, state: dict):
        super().__init__(message)
        self.state = state


# ---------------------------------------------------------------------------
# permutations and groups


@dataclass(frozen=True)
class Perm:
    """Bijection of ``range(n)`` stored as its image tuple; ``(p * q)(x) = p(q(x))``."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError("not a permutation")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Perm":
        img = list(range(n))
        img[a], img[b] = b, a
        return cls(tuple(img))

    @classmethod
    def from_mapping(cls, n: int, mapping: dict) -> "Perm":
        img = list(range(n))
        for a, b in mapping.items():
            img[a] = b
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(tuple(self.images[i] for i in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(len(self.images)):
            if start in seen or self.images[start] == start:
                continue
            cyc, x = [], start
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def restrict(self, points: Sequence[int]) -> "Perm":
        """Induced permutation on an invariant subset, reindexed by position."""
        pos = {p: i for i, p in enumerate(points)}
        try:
            return Perm(tuple(pos[self.images[p]] for p in points))
        except KeyError:
            raise ValueError("subset is not invariant") from None


@dataclass
class PermGroup:
    labels: tuple[str, ...]
    generators: list[Perm] = field(default_factory=list)
    _order: int | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return len(self.labels)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        for g in self.generators:
            if g.degree != self.degree:
                raise ValueError("generator acts on a different label set")

    def order(self) -> int:
        if self._order is None:
            self._order = group_order(self)
        return self._order

    def orbits(self) -> list[list[int]]:
        n = self.degree
        seen = [False] * n
        out = []
        for s in range(n):
            if seen[s]:
                continue
            orb, todo = [s], [s]
            seen[s] = True
            while todo:
                x = todo.pop()
                for g in self.generators:
                    y = g(x)
                    if not seen[y]:
                        seen[y] = True
                        orb.append(y)
                        todo.append(y)
            out.append(sorted(orb))
        return out

    def is_transitive(self) -> bool:
        return self.degree <= 1 or len(self.orbits()) == 1

    def to_json(self) -> dict:
        gens = []
        for g in self.generators:
            if g.is_identity():
                continue
            gens.append([[self.labels[x] for x in cyc] for cyc in g.cycles()])
        return {"labels": list(self.labels), "generators": gens, "order": self.order()}


def group_order(g: PermGroup) -> int:
    """Exact order via sympy's Schreier-Sims implementation."""
    gens = [p for p in g.generators if not p.is_identity()]
    if g.degree <= 1 or not gens:
        return 1
    sym = _SymGroup([_SymPerm(list(p.images)) for p in gens])
    return int(sym.order())


def closure_size(g: PermGroup, limit: int = 10**6) -> int:
    """Order by breadth-first closure of the generators (small groups only)."""
    n = g.degree
    ident = Perm.identity(n)
    seen = {ident}
    todo = deque([ident])
    while todo:
        x = todo.popleft()
        for s in g.generators:
            y = s * x
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise MonodromyError("closure limit exceeded")
                todo.append(y)
    return len(seen)


# ---------------------------------------------------------------------------
# base group


def _component_labels(model: DegenerateModel) -> tuple[str, ...]:
    return model.components


def _relabel_node(node: Node, sec: dict[int, int], fib: dict[int, int]) -> Node:
    if node.kind == "fs":
        return Node("fs", fib.get(node.i, node.i), sec.get(node.j, node.j))
    a, b = sec.get(node.i, node.i), sec.get(node.j, node.j)
    return Node("ss", min(a, b), max(a, b), node.l)


@dataclass
class BaseGroup:
    """Base monodromy on nodes followed by components, plus its node-only part."""

    extended: PermGroup
    on_nodes: PermGroup
    node_count: int

    def expected_order(self, model: DegenerateModel) -> int:
        return (
            math.factorial(model.k) ** math.comb(model.d, 2)
            * math.factorial(model.d)
            * math.factorial(model.f)
        )

    def to_json(self) -> dict:
        return {
            "order": self.extended.order(),
            "order_on_nodes": self.on_nodes.order(),
            "generators": self.extended.to_json()["generators"],
        }


def base_group(model: DegenerateModel) -> BaseGroup:
    """Slot transpositions, adjacent section swaps and adjacent fibre swaps.

    The group acts on nodes and components together so that it is faithful:
    with ``d = 2, f = 0, k = 1`` the section swap fixes the only node.
    """
    nodes = list(model.nodes)
    comps = list(_component_labels(model))
    labels = tuple(n.label for n in nodes) + tuple(comps)
    idx = {n: i for i, n in enumerate(nodes)}
    cidx = {c: len(nodes) + i for i, c in enumerate(comps)}
    n_all = len(labels)
    gens: list[Perm] = []
    for a, b in combinations(range(1, model.d + 1), 2):
        for l in range(1, model.k):
            gens.append(Perm.transposition(n_all, idx[Node("ss", a, b, l)], idx[Node("ss", a, b, l + 1)]))

    def relabel(sec: dict, fib: dict) -> Perm:
        mapping = {idx[n]: idx[_relabel_node(n, sec, fib)] for n in nodes}
        for s_from, s_to in sec.items():
            mapping[cidx[f"C{s_from}"]] = cidx[f"C{s_to}"]
        for f_from, f_to in fib.items():
            mapping[cidx[f"F{f_from}"]] = cidx[f"F{f_to}"]
        return Perm.from_mapping(n_all, mapping)

    for s in range(1, model.d):
        gens.append(relabel({s: s + 1, s + 1: s}, {}))
    for i in range(1, model.f):
        gens.append(relabel({}, {i: i + 1, i + 1: i}))
    extended = PermGroup(labels, gens)
    node_pts = list(range(len(nodes)))
    on_nodes = PermGroup(tuple(n.label for n in nodes), [g.restrict(node_pts) for g in gens])
    return BaseGroup(extended, on_nodes, len(nodes))


# ---------------------------------------------------------------------------
# moves


@dataclass(frozen=True)
class Move:
    """``kind`` is triangle or rectangle; ``swap = (x, y)``.

    With both swap nodes free this is a transposition of free nodes.  With
    ``y`` smoothed and ``x`` free it is a rewrite ``T -> T - y + x``.
    """

    kind: str
    support: tuple[Node, ...]
    swap: tuple[Node, Node]

    def key(self):
        return (self.kind, tuple(sorted(self.support)), self.swap)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "support": [n.label for n in self.support],
            "swap": [n.label for n in self.swap],
        }


class _Incidence:
    """Nodes between pairs of components."""

    def __init__(self, model: DegenerateModel):
        self.model = model
        self.between: dict[frozenset, list[Node]] = {}
        for n in model.nodes:
            self.between.setdefault(frozenset(n.components), []).append(n)
        self.comps = model.components

    def nodes(self, a: str, b: str) -> list[Node]:
        return self.between.get(frozenset((a, b)), [])


def _is_fiber(c: str) -> bool:
    return c.startswith("F")


def _triangle_constellations(inc: _Incidence, T: frozenset):
    """Yield ``(s, x, y)``: ``s`` in T on ``A∩B``, ``x`` on ``C∩A``, ``y`` on ``C∩B``."""
    for s in sorted(T):
        A0, B0 = s.components
        for A, B in ((A0, B0), (B0, A0)):
            for C in inc.comps:
                if C in (A, B):
                    continue
                if sum(map(_is_fiber, (A, B, C))) > 1:
                    continue
                for x in inc.nodes(C, A):
                    for y in inc.nodes(C, B):
                        yield s, x, y


def _rectangle_constellations(model: DegenerateModel, T: frozenset):
    """Yield ``(side, x, y)`` with both nodes of ``side`` in T and ``{x, y}`` the opposite side."""
    for a, b in combinations(range(1, model.d + 1), 2):
        for i, j in combinations(range(1, model.f + 1), 2):
            ia, ib, ja, jb = (Node("fs", i, a), Node("fs", i, b), Node("fs", j, a), Node("fs", j, b))
            sides = [((ia, ib), (ja, jb)), ((ja, jb), (ia, ib)), ((ia, ja), (ib, jb)), ((ib, jb), (ia, ja))]
            for side, opp in sides:
                if side[0] in T and side[1] in T:
                    yield side, opp[0], opp[1]
                    yield side, opp[1], opp[0]


def _require_tree(model: DegenerateModel, smoothed) -> frozenset:
    chosen = smoothed.chosen if isinstance(smoothed, SmoothingSet) else frozenset(smoothed)
    if not is_spanning_tree(model, chosen):
        raise MonodromyError("smoothed set must be a spanning tree (irreducible, genus 0)")
    return frozenset(chosen)


def _all_moves(model: DegenerateModel, T: frozenset) -> list[Move]:
    """Every admissible constellation with at least ``x`` free."""
    out = {}
    if model.k >= 1:
        inc = _Incidence(model)
        for s, x, y in _triangle_constellations(inc, T):
            if x in T:
                continue
            m = Move("triangle", (s,), (x, y))
            out[m.key()] = m
    else:
        for side, x, y in _rectangle_constellations(model, T):
            if x in T:
                continue
            m = Move("rectangle", side, (x, y))
            out[m.key()] = m
    return [out[k] for k in sorted(out)]


def _transpositions(model, T, kind):
    moves = []
    seen = set()
    for m in _all_moves(model, T):
        x, y = m.swap
        if y in T:
            continue
        pair = (min(x, y), max(x, y))
        key = (tuple(sorted(m.support)), pair)
        if key in seen:
            continue
        seen.add(key)
        moves.append(Move(kind, m.support, pair))
    return moves


def triangle_moves(model: DegenerateModel, smoothed) -> list[Move]:
    """Transpositions ``(x y)`` of free nodes supported on a smoothed node (k >= 1)."""
    if model.k == 0:
        raise MonodromyError("k = 0 has no triangles: use rectangle_moves")
    T = _require_tree(model, smoothed)
    return _transpositions(model, T, "triangle")


def rectangle_moves(model: DegenerateModel, smoothed) -> list[Move]:
    """Transpositions of the free side of a fibre/section rectangle (k = 0)."""
    if model.k >= 1:
        raise MonodromyError("k >= 1: use triangle_moves")
    T = _require_tree(model, smoothed)
    return _transpositions(model, T, "rectangle")


def rewrite_moves(model: DegenerateModel, T: frozenset) -> list[tuple[Move, frozenset]]:
    """Constellations moving the smoothing from ``y`` in T to a free ``x``."""
    out = []
    for m in _all_moves(model, T):
        x, y = m.swap
        if y in T:
            out.append((m, (T - {y}) | {x}))
    return out


# ---------------------------------------------------------------------------
# concentration


@dataclass(frozen=True)
class TraceStep:
    kind: str
    support: tuple[Node, ...]
    transposed: tuple[Node, Node]
    result: frozenset

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "support": [n.label for n in self.support],
            "transposed": [n.label for n in self.transposed],
            "result": [n.label for n in sorted(self.result)],
        }


@dataclass
class MoveTrace:
    start: frozenset
    steps: list[TraceStep] = field(default_factory=list)

    def final(self) -> frozenset:
        return self.steps[-1].result if self.steps else self.start

    def to_json(self) -> dict:
        return {
            "start": [n.label for n in sorted(self.start)],
            "steps": [s.to_json() for s in self.steps],
        }


def target_components(model: DegenerateModel) -> tuple[str, ...]:
    return ("C1",) if model.k >= 1 else ("C1", "F1")


def concentration_score(model: DegenerateModel, T: Iterable[Node]) -> int:
    """Number of smoothed nodes lying on the target component(s)."""
    target = set(target_components(model))
    return sum(1 for n in T if target & set(n.components))


def is_concentrated(model: DegenerateModel, T: Iterable[Node]) -> bool:
    T = list(T)
    return concentration_score(model, T) == len(T)


def _step_from(move: Move, new: frozenset) -> TraceStep:
    return TraceStep(move.kind, move.support, move.swap, new)


def concentrate(model: DegenerateModel, T) -> tuple[frozenset, MoveTrace]:
    """Rewrite ``T`` until every smoothed node lies on ``C1`` (``C1`` or ``F1`` when k = 0).

    Greedy: take the rewrite with the highest score, ties broken by the
    lexicographic order of the move.  If no rewrite improves the score, a
    breadth-first search over rewrites finishes the chain.
    """
    T = _require_tree(model, T)
    trace = MoveTrace(T)
    current = T
    visited = {current}
    while not is_concentrated(model, current):
        score = concentration_score(model, current)
        best = None
        for move, new in rewrite_moves(model, current):
            s = concentration_score(model, new)
            if s > score and new not in visited:
                cand = (-s, move.key())
                if best is None or cand < best[0]:
                    best = (cand, move, new)
        if best is not None:
            _, move, new = best
            trace.steps.append(_step_from(move, new))
            _check_step(model, new)
            current = new
            visited.add(new)
            continue
        path = _bfs_to_target(model, current)
        if path is None:
            raise ConcentrationStuck(
                "concentration stuck",
                {
                    "k": model.k, "d": model.d, "f": model.f,
                    "start": [n.label for n in sorted(T)],
                    "current": [n.label for n in sorted(current)],
                    "trace": trace.to_json(),
                },
            )
        for move, new in path:
            trace.steps.append(_step_from(move, new))
            _check_step(model, new)
            current = new
    return current, trace


def _check_step(model: DegenerateModel, T: frozenset):
    a = smoothing_analysis(SmoothingSet(model, T))
    if not a.irreducible or a.genus != 0:
        raise AssertionError(f"rewrite left the spanning trees: {sorted(n.label for n in T)}")


def _bfs_to_target(model: DegenerateModel, start: frozenset):
    parent = {start: None}
    todo = deque([start])
    while todo:
        cur = todo.popleft()
        if is_concentrated(model, cur):
            path = []
            while parent[cur] is not None:
                prev, move = parent[cur]
                path.append((move, cur))
                cur = prev
            return path[::-1]
        for move, new in rewrite_moves(model, cur):
            if new not in parent:
                parent[new] = (cur, move)
                todo.append(new)
    return None


# ---------------------------------------------------------------------------
# full monodromy


@dataclass
class MonodromyResult:
    tree: frozenset
    group: PermGroup
    order: int
    is_full_symmetric: bool
    transitive: bool
    trees_visited: int
    free_nodes: tuple[Node, ...]

    def to_json(self) -> dict:
        return {
            "tree": [n.label for n in sorted(self.tree)],
            "free_nodes": [n.label for n in self.free_nodes],
            "order": self.order,
            "expected_full_order": math.factorial(len(self.free_nodes)),
            "is_full_symmetric": self.is_full_symmetric,
            "transitive": self.transitive,
            "trees_visited": self.trees_visited,
            "generators": self.group.to_json()["generators"],
        }


def _node_perm(model: DegenerateModel, idx: dict, a: Node, b: Node) -> Perm:
    return Perm.transposition(len(model.nodes), idx[a], idx[b])


def full_monodromy(model: DegenerateModel, T) -> MonodromyResult:
    """Group generated on the free nodes ``N \\ T``.

    Breadth-first search over the spanning trees reachable from ``T`` by
    rewrites and base relabellings.  Each tree carries the node permutation
    ``phi`` of the path that reached it.  Generators at ``T`` are
    ``phi^-1 * t * phi`` for every transposition ``t`` available at a reached
    tree, and ``phi_2^-1 * e * phi_1`` for every edge ``e`` closing a loop.
    """
    T = _require_tree(model, T)
    nodes = list(model.nodes)
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    base = base_group(model)
    base_moves = [g for g in base.on_nodes.generators if not g.is_identity()]
    kind = "triangle" if model.k >= 1 else "rectangle"

    def as_set(perm: Perm, S: frozenset) -> frozenset:
        return frozenset(nodes[perm(idx[x])] for x in S)

    transport = {T: Perm.identity(n)}
    order_q = deque([T])
    gens: set[Perm] = set()
    while order_q:
        cur = order_q.popleft()
        phi = transport[cur]
        phi_inv = phi.inverse()
        for m in _transpositions(model, cur, kind):
            t = _node_perm(model, idx, *m.swap)
            gens.add(phi_inv * t * phi)
        edges = [(_node_perm(model, idx, *mv.swap), new) for mv, new in rewrite_moves(model, cur)]
        edges += [(g, as_set(g, cur)) for g in base_moves]
        for e, new in edges:
            if new not in transport:
                transport[new] = e * phi
                order_q.append(new)
            else:
                loop = transport[new].inverse() * e * phi
                if not loop.is_identity():
                    gens.add(loop)
    free = [i for i in range(n) if nodes[i] not in T]
    restricted = sorted({g.restrict(free) for g in gens}, key=lambda p: p.images)
    group = PermGroup(tuple(nodes[i].label for i in free), [g for g in restricted if not g.is_identity()])
    order = group.order()
    full = order == math.factorial(len(free))
    return MonodromyResult(
        tree=T,
        group=group,
        order=order,
        is_full_symmetric=full,
        transitive=group.is_transitive(),
        trees_visited=len(transport),
        free_nodes=tuple(nodes[i] for i in free),
    )


def tree_orbit_representatives(model: DegenerateModel) -> list[frozenset]:
    """One spanning tree per orbit of the base group acting on trees."""
    nodes = list(model.nodes)
    idx = {n: i for i, n in enumerate(nodes)}
    gens = [g for g in base_group(model).on_nodes.generators if not g.is_identity()]
    seen: set[frozenset] = set()
    reps = []
    for T in spanning_trees(model):
        if T in seen:
            continue
        reps.append(T)
        todo = [T]
        seen.add(T)
        while todo:
            cur = todo.pop()
            for g in gens:
                new = frozenset(nodes[g(idx[x])] for x in cur)
                if new not in seen:
                    seen.add(new)
                    todo.append(new)
    return reps
