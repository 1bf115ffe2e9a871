import random

import pytest

from relhyp import (
    BudgetExceededError,
    FreeGroup,
    PeripheralSpec,
    RelHyp,
    word_to_elem,
)
from relhyp.cayley import (
    BrokenLine,
    EdgePath,
    build_ball,
    rel_dist,
    rel_geodesic,
    relative_view,
    word_metric_view,
)
from relhyp.components import find_components, is_without_backtracking

w = word_to_elem


def coned_bfs_oracle(view, domain_radius):
    """Truncated coned-graph BFS distances, independent of rel_dist.

    Vertices: the X-ball of the given radius.  Edges: X-edges plus every
    peripheral edge between domain vertices.
    """
    from collections import deque

    G = view.group
    ball = build_ball(G.base, domain_radius)
    elems = list(ball.elements)
    index = {g: i for i, g in enumerate(elems)}
    adj = [[] for _ in elems]
    letters = [g for _, g in G.generator_elems()]
    letters += [G.inv(g) for g in letters]
    for g in elems:
        for l in letters:
            h = G.mul(g, l)
            if h in index:
                adj[index[g]].append(index[h])
    # peripheral edges: group domain vertices by coset
    for p in G.peripherals:
        cosets = {}
        for g in elems:
            cosets.setdefault(view.coset_key(p.nu, g), []).append(index[g])
        for members in cosets.values():
            for i in members:
                for j in members:
                    if i != j:
                        adj[i].append(j)

    def dist_from(src):
        d = {src: 0}
        q = deque([src])
        while q:
            v = q.popleft()
            for u in adj[v]:
                if u not in d:
                    d[u] = d[v] + 1
                    q.append(u)
        return d

    return elems, index, dist_from


class TestBall:
    def test_fab_radius_1(self, fab):
        assert len(build_ball(fab, 1)) == 5

    def test_radius_0(self, fab):
        assert len(build_ball(fab, 0)) == 1

    def test_z2_radius_2(self, z2):
        assert len(build_ball(z2, 2)) == 13

    def test_bfs_distance_matches_x_length(self, fab, z2):
        for G in (fab, z2):
            ball = build_ball(G, 4)
            for g in ball.elements:
                assert ball.dist[g] == G.x_length(g)

    def test_budget(self, fab):
        with pytest.raises(BudgetExceededError):
            build_ball(fab, 8, budget=100)

    def test_edge_inversion_closure(self, fab):
        ball = build_ball(fab, 3)
        edges = set()
        for u, v, g in ball.edges():
            edges.add((u, v))
        for (u, v) in edges:
            assert (v, u) in edges

    def test_closed_under_geodesics_to_identity(self, fab, z2, z2z):
        for G in (fab, z2, z2z.group.base):
            view = word_metric_view(G)
            ball = build_ball(G, 3)
            for g in ball.elements:
                for v in view.geodesic(G.identity(), g).vertices:
                    assert v in ball


class TestRelDist:
    def test_spec_examples(self, fab_rel_a, fab):
        e = fab.identity()
        assert rel_dist(e, w("a a a a a", fab), fab_rel_a) == 1
        assert rel_dist(w("b a", fab), w("b a", fab), fab_rel_a) == 0
        assert rel_dist(e, w("a a a b a a", fab), fab_rel_a) == 3

    def test_free_product_syllable_count(self, z2z):
        G = z2z.group.base
        assert rel_dist(G.identity(), w("x t", G), z2z) == 2
        path = rel_geodesic(G.identity(), w("x t", G), z2z)
        assert [lab[0] for lab in path.labels] == ["h", "h"]

    def test_geodesic_fixture(self, fab_rel_a, fab):
        path = rel_geodesic(fab.identity(), w("a a a b", fab), fab_rel_a)
        assert len(path) == 2
        assert path.labels[0][0] == "h" and path.labels[1][0] == "x"

    def test_empty_geodesic(self, fab_rel_a, fab):
        g = w("a b", fab)
        path = rel_geodesic(g, g, fab_rel_a)
        assert len(path) == 0 and path.start == path.end == g

    def test_rel_leq_word(self, fab_rel_a, fab):
        rng = random.Random(11)
        ball = build_ball(fab, 5)
        for _ in range(1000):
            u = rng.choice(ball.elements)
            v = rng.choice(ball.elements)
            assert fab_rel_a.dist(u, v) <= fab_rel_a.x_dist(u, v)

    def test_triangle_and_left_invariance(self, fab_rel_a, fab):
        # all triples in a small relative ball
        elems = [g for g in build_ball(fab, 3).elements if fab_rel_a.dist(fab.identity(), g) <= 2]
        sample = elems[:30]
        for x in sample:
            for y in sample:
                for z in sample:
                    assert fab_rel_a.dist(x, z) <= fab_rel_a.dist(x, y) + fab_rel_a.dist(y, z)
        t = w("b a a", fab)
        for x in sample[:12]:
            for y in sample[:12]:
                assert fab_rel_a.dist(fab.mul(t, x), fab.mul(t, y)) == fab_rel_a.dist(x, y)

    def test_whole_group_peripheral(self, fab):
        view = relative_view(RelHyp(fab, (PeripheralSpec(0, "whole-group"),)))
        assert view.dist(fab.identity(), w("a b a", fab)) == 1
        assert view.dist(w("a", fab), w("a", fab)) == 0

    def test_free_product_with_finite_factor(self):
        from relhyp import FreeProduct, cyclic_group
        from relhyp.groups import FreeAbelian

        FP = FreeProduct((cyclic_group(3, "u"), FreeAbelian(("t",))))
        view = relative_view(RelHyp(FP, (PeripheralSpec(0, "free-factor", 0),)))
        g = w("u t u u t^-1", FP)
        assert FP.x_length(g) == 4
        assert view.dist(FP.identity(), g) == 4
        geo = view.geodesic(FP.identity(), g)
        assert [lab[0] for lab in geo.labels] == ["h", "x", "h", "x"]
        import random

        rng = random.Random(3)
        elems = build_ball(FP, 4).elements
        for _ in range(2000):
            u, v = rng.choice(elems), rng.choice(elems)
            assert view.dist(u, v) == view._dist_generic(u, v)

    def test_agrees_with_coned_bfs_small(self, fab_rel_a, fab):
        elems, index, dist_from = coned_bfs_oracle(fab_rel_a, 4)
        e = fab.identity()
        near = [g for g in elems if dist_from(index[e]).get(index[g], 99) <= 2]
        for uu in near[:40]:
            table = dist_from(index[uu])
            for vv in near[:40]:
                assert table[index[vv]] == fab_rel_a.dist(uu, vv)


class TestPaths:
    def test_labels_compose(self, fab_rel_a, fab):
        p = EdgePath(
            fab_rel_a,
            fab.identity(),
            (("h", 0, w("a a a", fab)), ("x", w("b", fab))),
        )
        assert p.vertices == (fab.identity(), w("a a a", fab), w("a a a b", fab))
        assert p.elem() == w("a a a b", fab)

    def test_identity_label_rejected(self, fab_rel_a, fab):
        with pytest.raises(ValueError):
            EdgePath(fab_rel_a, fab.identity(), (("x", fab.identity()),))

    def test_h_label_must_be_peripheral(self, fab_rel_a, fab):
        with pytest.raises(ValueError):
            EdgePath(fab_rel_a, fab.identity(), (("h", 0, w("b", fab)),))

    def test_broken_line_requires_geodesics(self, fab_rel_a, fab):
        bad = EdgePath(fab_rel_a, fab.identity(), (("x", w("a", fab)), ("h", 0, w("a", fab))))
        with pytest.raises(ValueError):
            BrokenLine((bad,))

    def test_geodesics_have_single_edge_components(self, fab_rel_a, fab):
        rng = random.Random(3)
        ball = build_ball(fab, 5)
        for _ in range(300):
            u = rng.choice(ball.elements)
            v = rng.choice(ball.elements)
            path = fab_rel_a.geodesic(u, v)
            assert len(path) == fab_rel_a.dist(u, v)
            for c in find_components(path):
                assert c.edge_count() == 1
            assert is_without_backtracking(path)
