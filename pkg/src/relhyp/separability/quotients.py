"""Finite quotients as permutation representations, and separation searches.

A certificate is a homomorphism to a symmetric group, given by generator
images in one-line notation.  Every search re-verifies its candidate by
direct image computation before returning it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from ..errors import BudgetExceededError, UnsupportedFamilyError
from ..groups import Elem, FiniteGroup, FreeGroup, GroupSpec
from .rational import RationalSubset
from .stallings import StallingsGraph, spanning_tree, subgroup_graph

Perm = tuple


def perm_identity(n: int) -> Perm:
    return tuple(range(n))


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Apply p, then q."""
    return tuple(q[p[i]] for i in range(len(p)))


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def perm_block_sum(p: Perm, q: Perm) -> Perm:
    n = len(p)
    return p + tuple(v + n for v in q)


def subgroup_closure(gens: Sequence[Perm], n: int, budget: int = 100_000) -> frozenset:
    """The subgroup of S_n generated by ``gens`` (breadth-first closure)."""
    e = perm_identity(n)
    seen = {e}
    frontier = [e]
    gens = list(gens) + [perm_inv(g) for g in gens]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = perm_mul(p, g)
                if q not in seen:
                    if len(seen) >= budget:
                        raise BudgetExceededError("permutation closure too large")
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return frozenset(seen)


def product_set(parts: Sequence[frozenset], budget: int = 2_000_000) -> frozenset:
    cur = None
    for part in parts:
        if cur is None:
            cur = frozenset(part)
            continue
        nxt = set()
        if len(cur) * len(part) > budget:
            raise BudgetExceededError("permutation product set too large")
        for p in cur:
            for q in part:
                nxt.add(perm_mul(p, q))
        cur = frozenset(nxt)
    return cur if cur is not None else frozenset()


@dataclass(frozen=True)
class FiniteQuotient:
    """A homomorphism from a whitelisted group onto permutations of n points.

    ``gen_images`` aligns with ``domain.generator_elems()``.  For free
    domains any assignment is a homomorphism; other families are checked.
    """

    domain: GroupSpec
    degree: int
    gen_images: tuple[Perm, ...]

    def __post_init__(self):
        self.check()

    def image_of(self, g: Elem) -> Perm:
        if isinstance(self.domain, FreeGroup):
            imgs = self.gen_images
            out = perm_identity(self.degree)
            for x in g:
                p = imgs[abs(x) - 1]
                out = perm_mul(out, p if x > 0 else perm_inv(p))
            return out
        if isinstance(self.domain, FiniteGroup):
            return self._finite_map()[g]
        raise UnsupportedFamilyError(type(self.domain).__name__)

    @lru_cache(maxsize=None)
    def _finite_map(self):
        dom = self.domain
        gens = [g for _, g in dom.generator_elems()]
        images = dict(zip(gens, self.gen_images))
        e = dom.identity()
        table = {e: perm_identity(self.degree)}
        frontier = [e]
        while frontier:
            nxt = []
            for v in frontier:
                for g, img in images.items():
                    w = dom.mul(v, g)
                    if w not in table:
                        table[w] = perm_mul(table[v], img)
                        nxt.append(w)
            frontier = nxt
        return table

    def check(self) -> None:
        for p in self.gen_images:
            if sorted(p) != list(range(self.degree)):
                raise ValueError("generator image is not a permutation")
        if isinstance(self.domain, FiniteGroup):
            table = self._finite_map()
            if len(table) != self.domain.order:
                raise ValueError("generator images do not define a full map")
            for a in self.domain.all_elements():
                for b in self.domain.all_elements():
                    if table[self.domain.mul(a, b)] != perm_mul(table[a], table[b]):
                        raise ValueError("images do not respect the table")

    def subgroup_image(self, gens: Sequence[Elem]) -> frozenset:
        return subgroup_closure([self.image_of(g) for g in gens], self.degree)

    def _image_set(self) -> frozenset:
        if isinstance(self.domain, FiniteGroup):
            return frozenset(self._finite_map().values())
        return subgroup_closure(self.gen_images, self.degree)

    def _image_index_map(self) -> dict:
        return {p: i for i, p in enumerate(sorted(self._image_set()))}

    def certificate(self) -> dict:
        return {
            "degree": self.degree,
            "generator_images": [list(p) for p in self.gen_images],
        }


def image_of_rational_subset(q: FiniteQuotient, Z: RationalSubset) -> frozenset:
    parts = [frozenset([q.image_of(Z.g0)])] if Z.g0 else []
    for gens in Z.factors:
        parts.append(q.subgroup_image(gens))
    if not parts:
        parts = [frozenset([perm_identity(q.degree)])]
    return product_set(parts)


def verify_separation(q: FiniteQuotient, g: Elem, Z: RationalSubset) -> bool:
    """Independent re-verification: compute images from scratch."""
    return q.image_of(g) not in image_of_rational_subset(q, Z)


def _completion_quotient(G: FreeGroup, graph: StallingsGraph, g: Elem) -> FiniteQuotient:
    """Extend the core graph by the walk of g, then complete every letter's
    partial injection to a permutation.  The subgroup image stabilises the
    basepoint while the image of g moves it."""
    out = [dict(t) for t in graph.out]
    v = graph.basepoint
    for x in g:
        w = out[v].get(x)
        if w is None:
            out.append({})
            w = len(out) - 1
            out[v][x] = w
            out[w][-x] = v
        v = w
    n = len(out)
    images = []
    for i in range(G.rank):
        x = i + 1
        mapped = {u: out[u][x] for u in range(n) if x in out[u]}
        sources = [u for u in range(n) if u not in mapped]
        targets = [u for u in range(n) if u not in set(mapped.values())]
        # rotate so that, when possible, unmatched vertices are not fixed
        if len(targets) > 1:
            targets = targets[1:] + targets[:1]
        mapped.update(zip(sources, targets))
        images.append(tuple(mapped[u] for u in range(n)))
    return FiniteQuotient(G, n, tuple(images))


def _assignments_exhaustive(rank: int, n: int):
    perms = list(itertools.permutations(range(n)))
    return itertools.product(perms, repeat=rank)


def _cycle_type(p: Perm) -> tuple:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        l = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            l += 1
        out.append(l)
    return tuple(sorted(out))


def _conjugacy_reps(n: int) -> list:
    reps: dict = {}
    for p in itertools.permutations(range(n)):
        reps.setdefault(_cycle_type(p), p)
    return list(reps.values())


def _image_word(images, w) -> Perm:
    out = perm_identity(len(images[0]))
    for x in w:
        p = images[abs(x) - 1]
        out = perm_mul(out, p if x > 0 else perm_inv(p))
    return out


def _image_in_product(pg: Perm, closures, budget: int = 400_000):
    """Is pg in the setwise product of the image subgroups?

    Returns True/False, or None when the cross-product walk would exceed the
    budget (the candidate is then skipped, never trusted).
    """
    if len(closures) == 1:
        return pg in closures[0]
    if len(closures) == 2:
        h1, h2 = closures
        if len(h1) <= len(h2):
            return any(perm_mul(perm_inv(h), pg) in h2 for h in h1)
        return any(perm_mul(pg, perm_inv(h)) in h1 for h in h2)
    h1, h2, h3 = closures
    if len(h1) * len(h2) > budget:
        return None
    mid = {perm_mul(perm_inv(h), pg) for h in h1}
    return any(perm_mul(perm_inv(b), a) in h3 for a in mid for b in h2)


def _assignments_blocks(rank: int, blocks: Sequence[int]):
    pools = [list(itertools.permutations(range(b))) for b in blocks]
    for combo in itertools.product(*[itertools.product(pool, repeat=rank) for pool in pools]):
        images = []
        for i in range(rank):
            img = combo[0][i]
            for blk in combo[1:]:
                img = perm_block_sum(img, blk[i])
            images.append(img)
        yield tuple(images)


def find_separating_quotient(
    g: Elem,
    target: RationalSubset,
    n_max: int = 6,
    seed: int = 0,
    random_tries: int = 200,
) -> Optional[FiniteQuotient]:
    """A finite quotient in which the image of g avoids the image of the
    target subset, or None when the search cap is exhausted.

    Search order: exhaustive images in S_2..S_4, block sums filling up to
    n_max points, the basepoint-stabiliser completion for single subgroups,
    seeded random images, and finally (rank 2) an exhaustive scan of S_5 and
    S_6 up to simultaneous conjugacy, which decides degrees <= n_max
    outright apart from budget-skipped three-factor candidates.
    """
    G = target.group
    if target.contains(g):
        raise ValueError("element is in the target subset; nothing to separate")
    rank = G.rank
    factor_words = [tuple(gens) for gens in target.factors]
    g0 = target.g0

    def candidate(images) -> Optional[FiniteQuotient]:
        n = len(images[0])
        pg = _image_word(images, g)
        closures = []
        for gens in factor_words:
            closures.append(
                subgroup_closure([_image_word(images, x) for x in gens], n)
            )
        probe = pg if not g0 else perm_mul(perm_inv(_image_word(images, g0)), pg)
        hit = _image_in_product(probe, closures)
        if hit is not False:
            return None
        q = FiniteQuotient(G, n, tuple(images))
        if verify_separation(q, g, target):
            return q
        return None

    for n in range(2, min(4, n_max) + 1):
        for images in _assignments_exhaustive(rank, n):
            q = candidate(list(images))
            if q:
                return q
    for blocks in ((2, 2), (2, 3), (3, 3), (2, 2, 2)):
        if sum(blocks) > n_max:
            continue
        for images in _assignments_blocks(rank, blocks):
            q = candidate(list(images))
            if q:
                return q
    if len(target.factors) == 1 and not target.g0:
        comp = _completion_quotient(G, target.graphs[0], g)
        if verify_separation(comp, g, target):
            return comp
    rng = random.Random(seed)
    for n in range(5, n_max + 1):
        pool = list(range(n))
        for _ in range(random_tries):
            images = []
            for _ in range(rank):
                p = pool[:]
                rng.shuffle(p)
                images.append(tuple(p))
            q = candidate(images)
            if q:
                return q
    if rank == 2:
        for n in range(5, n_max + 1):
            reps = _conjugacy_reps(n)
            perms = list(itertools.permutations(range(n)))
            for pa in reps:
                for pb in perms:
                    q = candidate([pa, pb])
                    if q:
                        return q
    return None


@dataclass(frozen=True)
class MinxHarnessResult:
    quotient: Optional[FiniteQuotient]
    achieved_min: object  # int or math.inf over the checked ball
    verified: bool
    checked_radius: int
    caveats: tuple[str, ...]


def combine_quotients(G: FreeGroup, quotients: Sequence[FiniteQuotient]) -> FiniteQuotient:
    """Direct sum on disjoint points; the kernel is the intersection of kernels."""
    images = None
    degree = 0
    for q in quotients:
        degree += q.degree
        if images is None:
            images = list(q.gen_images)
        else:
            images = [perm_block_sum(a, b) for a, b in zip(images, q.gen_images)]
    if images is None:
        images = [(0,) for _ in range(G.rank)]
        degree = 1
    return FiniteQuotient(G, degree, tuple(images))


def minx_quotient_harness(
    Z: RationalSubset,
    C: int,
    n_max: int = 6,
    seed: int = 0,
    check_radius: Optional[int] = None,
) -> MinxHarnessResult:
    """Find a quotient whose kernel N satisfies minx(ZN \\ Z) >= C.

    Every element shorter than C outside Z gets a separating quotient; the
    block sum of those quotients has the required kernel.  Membership in ZN
    is decided through images, and the bound is re-verified on the ball of
    radius ``check_radius`` (default C + 2).
    """
    import math

    from ..cayley import build_ball

    G = Z.group
    radius = check_radius if check_radius is not None else C + 2
    ball = build_ball(G, max(radius, max(C - 1, 0)))
    outsiders = [
        g for g in ball.elements if len(g) < C and not Z.contains(g)
    ]
    caveats = []
    parts = []
    for u in outsiders:
        q = find_separating_quotient(u, Z, n_max=n_max, seed=seed)
        if q is None:
            return MinxHarnessResult(None, None, False, radius, ("separation search cap exhausted at %s" % G.elem_str(u),))
        parts.append(q)
    combined = combine_quotients(G, parts)
    z_image = image_of_rational_subset(combined, Z)
    achieved = math.inf
    ok = True
    for g in ball.elements:
        if ball.dist[g] > radius:
            continue
        in_zn = combined.image_of(g) in z_image
        if in_zn and not Z.contains(g):
            achieved = min(achieved, len(g))
            if len(g) < C:
                ok = False
    caveats.append("ZN membership checked through images on the radius-%d ball" % radius)
    return MinxHarnessResult(combined, achieved, ok and achieved >= C, radius, tuple(caveats))
