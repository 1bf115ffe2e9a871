"""Path representatives: factorizations of an element through prescribed
subgroups, realized as broken lines, ordered by lexicographic type.

The type of a representative is the triple (segment count of the core part,
total length, total X-length of all peripheral components); minimization is
a budget-bounded exhaustive search whose output is exact within the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

from .cayley import BrokenLine, RelGraphView, build_ball, trivial_path
from .components import find_components
from .geometry import gromov_product
from .groups import Elem, SubgroupSpec
from .separability import membership_oracle

CORE_ROLES = ("Q'", "R'")


class RepType(NamedTuple):
    """Lexicographically ordered type triple."""

    n: int
    length: int
    comp_x_length: int


@dataclass(frozen=True)
class PathRep:
    """A broken line whose segment labels factor an element.

    Kinds: "I" has core segments only (roles Q'/R'); "II" wraps them in a
    Q-prefix and R-suffix; "III" appends T_1..T_m tail segments after the
    suffix.  Trivial prefix/suffix/tail segments are genuine segments.
    """

    kind: str
    line: BrokenLine
    roles: tuple[str, ...]

    def __post_init__(self):
        if len(self.roles) != len(self.line.segments):
            raise ValueError("one role per segment")
        core = self.core_indices()
        if self.kind == "I":
            if core != list(range(len(self.roles))):
                raise ValueError("kind I has only core segments")
        elif self.kind in ("II", "III"):
            if self.roles[0] != "Q":
                raise ValueError("kind II/III starts with a Q segment")
            r_pos = len(self.roles) - 1 if self.kind == "II" else self.roles.index("R")
            if self.roles[r_pos] != "R":
                raise ValueError("kind II/III needs an R segment after the core")
            for i in range(1, r_pos):
                if self.roles[i] not in CORE_ROLES:
                    raise ValueError("non-core role inside the core block")
            if self.kind == "III":
                tails = self.roles[r_pos + 1 :]
                if list(tails) != ["T%d" % (i + 1) for i in range(len(tails))]:
                    raise ValueError("tail roles must be T1..Tm in order")
        else:
            raise ValueError("unknown kind %r" % self.kind)

    def core_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r in CORE_ROLES]

    def tail_indices(self) -> list[int]:
        return [i for i, r in enumerate(self.roles) if r.startswith("T")]

    def segment_elem(self, i: int) -> Elem:
        return self.line.segments[i].elem()

    def represented(self) -> Elem:
        G = self.line.view.group
        return G.mul(G.inv(self.line.start), self.line.end)


def type_of(rep: PathRep) -> RepType:
    n = len(rep.core_indices())
    if rep.kind == "I":
        n = max(n, 1)  # the identity keeps one trivial segment
    total = rep.line.length()
    comp_total = 0
    for seg in rep.line.segments:
        for c in find_components(seg):
            comp_total += c.x_length
    return RepType(n, total, comp_total)


def width(rep: PathRep) -> int:
    return len(rep.core_indices())


def tail_height(rep: PathRep):
    """min(|r|_X, |t_1|_X, ..., |t_{m-1}|_X); +inf when there is no tail."""
    if rep.kind != "III":
        raise ValueError("tail height is defined for kind III")
    view = rep.line.view
    tails = rep.tail_indices()
    m = len(tails)
    if m == 0:
        return math.inf
    r_pos = rep.roles.index("R")
    vals = [view.x_dist(rep.line.segments[r_pos].start, rep.line.segments[r_pos].end)]
    for i in tails[:-1]:
        seg = rep.line.segments[i]
        vals.append(view.x_dist(seg.start, seg.end))
    return min(vals)


def check_alternation(
    rep: PathRep,
    in_qp: Callable[[Elem], bool],
    in_rp: Callable[[Elem], bool],
    in_s: Callable[[Elem], bool],
) -> bool:
    """Do the core segments alternate between Q'-only and R'-only elements?

    For kinds II/III the core must start in R', end in Q', and have even
    width whenever it is nonempty.
    """
    core = rep.core_indices()
    if not core:
        return True
    elems = [rep.segment_elem(i) for i in core]
    if len(elems) == 1 and rep.kind == "I":
        return in_qp(elems[0]) or in_rp(elems[0])
    sides = []
    for x in elems:
        if in_s(x):
            return False
        q, r = in_qp(x), in_rp(x)
        if not (q or r):
            return False
        sides.append("Q'" if q else "R'")
    if any(a == b for a, b in zip(sides, sides[1:])):
        return False
    if rep.kind in ("II", "III"):
        if sides[0] != "R'" or sides[-1] != "Q'":
            return False
        if len(sides) % 2 != 0:
            return False
    return True


def node_products_bounded(rep: PathRep, c0) -> tuple[bool, object, tuple]:
    """Relative Gromov products at the interior nodes, compared against c0."""
    view = rep.line.view
    nodes = rep.line.nodes
    prods = tuple(
        gromov_product(nodes[i - 1], nodes[i + 1], nodes[i], view)
        for i in range(1, len(nodes) - 1)
    )
    worst = max(prods, default=0)
    return all(p <= c0 for p in prods), worst, prods


@dataclass(frozen=True)
class SearchBudget:
    max_factors: int = 6
    max_len: int = 8

    def describe(self) -> str:
        return "factors <= %d, factor X-length <= %d" % (self.max_factors, self.max_len)


@dataclass(frozen=True)
class MinimizeResult:
    rep: Optional[PathRep]
    rep_type: Optional[RepType]
    budget: SearchBudget
    caveat: str


def _candidates(view: RelGraphView, spec: SubgroupSpec, max_len: int) -> list[Elem]:
    G = view.group
    oracle = membership_oracle(G, spec.gens)
    ball = build_ball(G.base, max_len)
    out = [g for g in ball.elements if g != G.identity() and oracle(g)]
    out.sort(key=G.sort_key)
    return out


def minimize_type(
    g: Elem,
    qp: SubgroupSpec,
    rp: SubgroupSpec,
    view: RelGraphView,
    budget: SearchBudget = SearchBudget(),
) -> MinimizeResult:
    """Exhaustive minimal-type search over factorizations g = y_1 ... y_n
    with every y_i in Q' or R', within the budget.

    The identity is represented by a single trivial segment of type (1,0,0).
    Output is labelled minimal up to the budget, never globally.
    """
    G = view.group
    caveat = "minimal up to budget (%s)" % budget.describe()
    if g == G.identity():
        line = BrokenLine((trivial_path(view, G.identity()),))
        rep = PathRep("I", line, ("Q'",))
        return MinimizeResult(rep, RepType(1, 0, 0), budget, caveat)

    cand_q = _candidates(view, qp, budget.max_len)
    cand_r = _candidates(view, rp, budget.max_len)
    pool = [(y, "Q'") for y in cand_q] + [(y, "R'") for y in cand_r]

    best: Optional[tuple[RepType, tuple]] = None

    def consider(seq):
        nonlocal best
        nodes = [G.identity()]
        for y, _ in seq:
            nodes.append(G.mul(nodes[-1], y))
        line = BrokenLine.from_nodes(view, nodes)
        rep = PathRep("I", line, tuple(role for _, role in seq))
        t = type_of(rep)
        if best is None or t < best[0]:
            best = (t, rep)

    def dfs(prefix, value, remaining):
        if value == g and prefix:
            consider(prefix)
        if not remaining:
            return
        gap = G.x_length(G.mul(G.inv(value), g))
        if gap > remaining * budget.max_len:
            return
        if best is not None and len(prefix) + 1 > best[0].n:
            # a longer factorization can never beat the current best type
            return
        for y, role in pool:
            prefix.append((y, role))
            dfs(prefix, G.mul(value, y), remaining - 1)
            prefix.pop()

    dfs([], G.identity(), budget.max_factors)
    if best is None:
        return MinimizeResult(None, None, budget, "not found within budget (%s)" % budget.describe())
    return MinimizeResult(best[1], best[0], budget, caveat)
