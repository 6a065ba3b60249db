import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from severi.hirzebruch import HirzebruchClass, ModelError, Node, default_model, is_spanning_tree, spanning_trees
from severi.monodromy import (
    MonodromyError,
    Perm,
    PermGroup,
    base_group,
    closure_size,
    concentrate,
    full_monodromy,
    group_order,
    is_concentrated,
    rectangle_moves,
    rewrite_moves,
    tree_orbit_representatives,
    triangle_moves,
)


def model(k, d, f, seed=0):
    return default_model(HirzebruchClass(k, d, f), seed)


def desk_classes(limit=10):
    for k in range(3):
        for d in range(1, 4):
            for f in range(4):
                try:
                    klass = HirzebruchClass(k, d, f)
                except ModelError:
                    continue
                if klass.node_count <= limit:
                    yield k, d, f


# --- permutations ------------------------------------------------------------


@given(st.permutations(range(6)), st.permutations(range(6)))
def test_perm_algebra(a, b):
    p, q = Perm(tuple(a)), Perm(tuple(b))
    assert (p * q)(3) == p(q(3))
    assert (p * p.inverse()).is_identity()
    assert (p * q).inverse() == q.inverse() * p.inverse()


def test_group_order_examples():
    assert group_order(PermGroup(("a", "b", "c"), [Perm.transposition(3, 0, 1)])) == 2
    assert group_order(PermGroup(("a", "b", "c"), [Perm.transposition(3, 0, 1), Perm((1, 2, 0))])) == 6
    for n in range(1, 7):
        gens = [Perm.transposition(n, i, i + 1) for i in range(n - 1)]
        g = PermGroup(tuple(map(str, range(n))), gens)
        assert group_order(g) == math.factorial(n) == closure_size(g)


def test_restrict_requires_invariant_subset():
    with pytest.raises(ValueError):
        Perm((1, 0, 2)).restrict([0, 2])


# --- base group --------------------------------------------------------------------


@pytest.mark.parametrize("kdf", [(2, 2, 1), (0, 2, 2), (1, 2, 0)])
def test_base_group_examples(kdf):
    m = model(*kdf)
    assert base_group(m).extended.order() == {(2, 2, 1): 4, (0, 2, 2): 4, (1, 2, 0): 2}[kdf]


def test_base_group_order_formula_and_closure():
    for k in range(3):
        for d in range(1, 4):
            for f in range(4):
                try:
                    m = model(k, d, f)
                except ModelError:
                    continue
                bg = base_group(m)
                expected = math.factorial(k) ** math.comb(d, 2) * math.factorial(d) * math.factorial(f)
                assert bg.extended.order() == expected == bg.expected_order(m)
                if expected <= 5000:
                    assert closure_size(bg.extended) == expected


def test_base_group_not_faithful_on_nodes_alone():
    bg = base_group(model(1, 2, 0))
    assert bg.extended.order() == 2 and bg.on_nodes.order() == 1


# --- moves --------------------------------------------------------------------------


def oracle_triangles(m, T):
    """Brute-force scan over ordered triples of distinct components and node triples."""
    out = set()
    comps = m.components
    for D1, D2, D3 in itertools.permutations(comps, 3):
        if sum(c.startswith("F") for c in (D1, D2, D3)) > 1:
            continue
        for q1, q2, q3 in itertools.product(m.nodes, repeat=3):
            if set(q1.components) == {D2, D3} and set(q2.components) == {D1, D3} \
                    and set(q3.components) == {D1, D2} and q1 in T and q2 not in T and q3 not in T:
                out.add(((q1,), tuple(sorted((q2, q3)))))
    return out


def test_triangle_moves_match_oracle():
    for kdf in [(1, 3, 0), (1, 3, 1), (2, 3, 0), (1, 2, 2), (2, 2, 1)]:
        m = model(*kdf)
        for T in spanning_trees(m):
            got = {(mv.support, mv.swap) for mv in triangle_moves(m, T)}
            assert got == oracle_triangles(m, T), (kdf, sorted(T))


def test_triangle_examples():
    m = model(1, 3, 0)
    for T in spanning_trees(m):
        assert triangle_moves(m, T) == []
    m = model(1, 3, 1)
    one_triangle_edge = [T for T in spanning_trees(m) if sum(n.kind == "ss" for n in T) == 1]
    assert one_triangle_edge
    assert any(triangle_moves(m, T) for T in one_triangle_edge)


def test_move_family_gates():
    m0, m1 = model(0, 2, 2), model(1, 2, 1)
    T0, T1 = next(spanning_trees(m0)), next(spanning_trees(m1))
    with pytest.raises(MonodromyError):
        triangle_moves(m0, T0)
    with pytest.raises(MonodromyError):
        rectangle_moves(m1, T1)
    with pytest.raises(MonodromyError):
        triangle_moves(m1, frozenset(m1.nodes))


def oracle_rectangles(m, T):
    out = set()
    for a, b in itertools.combinations(range(1, m.d + 1), 2):
        for i, j in itertools.combinations(range(1, m.f + 1), 2):
            cyc = [Node("fs", i, a), Node("fs", i, b), Node("fs", j, b), Node("fs", j, a)]
            for s in range(4):  # consecutive pair = one side; the side two steps on is opposite
                side = {cyc[s], cyc[(s + 1) % 4]}
                opp = (cyc[(s + 2) % 4], cyc[(s + 3) % 4])
                if side <= T and not (set(opp) & T):
                    out.add((tuple(sorted(side)), tuple(sorted(opp))))
    return out


def test_rectangle_moves_match_oracle():
    for kdf in [(0, 2, 2), (0, 2, 3), (0, 3, 2), (0, 3, 3)]:
        m = model(*kdf)
        for T in spanning_trees(m):
            got = {(tuple(sorted(mv.support)), mv.swap) for mv in rectangle_moves(m, T)}
            assert got == oracle_rectangles(m, T)
            if kdf == (0, 2, 2):
                assert len(got) <= 1


def test_rectangles_absent_for_single_section_or_fibre():
    for kdf in [(0, 1, 3), (0, 3, 1)]:
        m = model(*kdf)
        for T in spanning_trees(m):
            assert rectangle_moves(m, T) == []


def test_rewrites_stay_spanning_trees():
    for kdf in desk_classes(9):
        m = model(*kdf)
        for T in spanning_trees(m):
            for mv, new in rewrite_moves(m, T):
                x, y = mv.swap
                assert y in T and x not in T
                assert all(s in T for s in mv.support)
                assert is_spanning_tree(m, new)


# --- concentration ---------------------------------------------------------------------


def test_concentrate_identity_when_done():
    m = model(1, 3, 1)
    star = frozenset(n for n in m.nodes if "C1" in n.components)
    tilde, trace = concentrate(m, star)
    assert tilde == star and trace.steps == []


@pytest.mark.parametrize("kdf", [(1, 3, 1), (0, 2, 2), (0, 3, 3), (2, 3, 1), (1, 3, 2)])
def test_concentrate_reaches_target(kdf):
    m = model(*kdf)
    for T in spanning_trees(m):
        tilde, trace = concentrate(m, T)
        assert is_concentrated(m, tilde)
        current = T
        for step in trace.steps:
            x, y = step.transposed
            assert y in current and x not in current
            assert step.result == (current - {y}) | {x}
            assert is_spanning_tree(m, step.result)
            current = step.result
        assert current == tilde


def test_concentrate_example_fibre_tree():
    m = model(1, 3, 1)
    T = frozenset({Node("fs", 1, 2), Node("fs", 1, 3), Node("ss", 1, 2, 1)})
    tilde, _ = concentrate(m, T)
    assert all("C1" in n.components for n in tilde)


# --- full monodromy -------------------------------------------------------------------------


def test_full_monodromy_examples():
    m = model(1, 3, 1)
    for T in spanning_trees(m):
        r = full_monodromy(m, T)
        assert r.order == 6 and r.is_full_symmetric
    m = model(0, 2, 3)
    for T in spanning_trees(m):
        r = full_monodromy(m, T)
        assert len(r.free_nodes) == 2 and r.order == 2
    m = model(0, 2, 2)
    r = full_monodromy(m, next(spanning_trees(m)))
    assert r.order == 1 and r.is_full_symmetric and len(r.free_nodes) == 1


def transposition_graph_connected(group: PermGroup) -> bool:
    """A transitive set of transpositions generates the full symmetric group."""
    n = group.degree
    adj = {i: set() for i in range(n)}
    for g in group.generators:
        cyc = g.cycles()
        if len(cyc) == 1 and len(cyc[0]) == 2:
            a, b = cyc[0]
            adj[a].add(b)
            adj[b].add(a)
    seen, todo = {0}, [0]
    while todo:
        for y in adj[todo.pop()]:
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == n


def test_full_monodromy_independent_checks():
    for kdf in desk_classes(9):
        m = model(*kdf)
        for T in tree_orbit_representatives(m):
            r = full_monodromy(m, T)
            n_free = len(r.free_nodes)
            if n_free <= 1:
                assert r.order == 1
                continue
            assert r.transitive == (len(r.group.orbits()) == 1)
            if r.is_full_symmetric:
                assert r.transitive
            if n_free <= 7:
                assert closure_size(r.group) == r.order


def test_transpositions_alone_can_certify():
    # k = 1 triangles: transposition graph is connected on every tree of (1, 3, 1)
    m = model(1, 3, 1)
    for T in spanning_trees(m):
        assert transposition_graph_connected(full_monodromy(m, T).group)


def test_group_json_uses_labels():
    m = model(1, 3, 1)
    r = full_monodromy(m, next(spanning_trees(m)))
    data = r.to_json()
    labels = {n.label for n in r.free_nodes}
    for gen in data["generators"]:
        for cyc in gen:
            assert set(cyc) <= labels
    assert data["expected_full_order"] == math.factorial(len(labels))


def test_orbit_representatives_cover_all_trees():
    m = model(0, 3, 2)
    reps = tree_orbit_representatives(m)
    assert 1 <= len(reps) <= len(list(spanning_trees(m)))
