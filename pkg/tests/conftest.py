"""Shared fixtures and independent oracles for the test suite.

Oracles here deliberately avoid the library's own normal-form code paths:
free words are reduced by repeated adjacent-pair deletion, amalgam equality
is decided by a union-find closure of elementary rewriting moves, and
relative distances are recomputed by breadth-first search on explicitly
built coned graphs.
"""

from __future__ import annotations

import random

import pytest

from relhyp import (
    Amalgam,
    FreeAbelian,
    FreeGroup,
    FreeProduct,
    PeripheralSpec,
    RelHyp,
    cyclic_group,
    word_to_elem,
)
from relhyp.cayley import RelGraphView, relative_view, word_metric_view


def w(word, G):
    return word_to_elem(word, G)


@pytest.fixture(scope="session")
def fab():
    return FreeGroup(("a", "b"))


@pytest.fixture(scope="session")
def fab_rel_a(fab):
    return relative_view(RelHyp(fab, (PeripheralSpec(0, "cyclic-generator", "a"),)))


@pytest.fixture(scope="session")
def fab_word(fab):
    return word_metric_view(fab)


@pytest.fixture(scope="session")
def z2():
    return FreeAbelian(("x", "y"))


@pytest.fixture(scope="session")
def z2z():
    base = FreeProduct((FreeAbelian(("x", "y")), FreeAbelian(("t",))))
    return relative_view(
        RelHyp(
            base,
            (PeripheralSpec(0, "free-factor", 0), PeripheralSpec(1, "free-factor", 1)),
        )
    )


@pytest.fixture(scope="session")
def amalgam46():
    A = Amalgam(cyclic_group(4, "b"), cyclic_group(6, "c"), ((0, 0), (2, 3)))
    A.spot_check()
    return A


# -- independent oracles -----------------------------------------------------


def reduce_letters_naive(letters):
    """Free reduction by repeated scanning, independent of the library."""
    out = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            if out[i] == -out[i + 1]:
                del out[i : i + 2]
                changed = True
                break
    return tuple(out)


def random_free_letters(rng: random.Random, rank: int, max_len: int):
    return [
        rng.choice([s * i for i in range(1, rank + 1) for s in (1, -1)])
        for _ in range(rng.randrange(max_len + 1))
    ]


def amalgam_word_classes(A: Amalgam, max_syllables: int):
    """Union-find over elementary rewriting moves on short syllable words.

    Moves: merge adjacent same-factor syllables (dropping identities), slide
    an edge-subgroup element into the next syllable, and flip the factor of
    a lone edge-subgroup syllable.  Two words are equal in the group iff they
    are connected by these moves, so the classes are an equality oracle that
    never consults the library's normal form.
    """
    sides = (A.left, A.right)
    d_left, d_right = A.d_sets()
    d_of = (d_left, d_right)
    cross = {(0, d): A.cross(0, d) for d in d_left}
    cross.update({(1, d): A.cross(1, d) for d in d_right})

    def clean(syls):
        return tuple((s, x) for (s, x) in syls if x != sides[s].identity())

    def neighbors(word):
        out = []
        for i in range(len(word) - 1):
            (s1, x1), (s2, x2) = word[i], word[i + 1]
            if s1 == s2:
                # merge adjacent same-factor syllables
                prod = sides[s1].mul(x1, x2)
                out.append(clean(word[:i] + ((s1, prod),) + word[i + 2 :]))
            else:
                # slide a nontrivial edge element across the boundary
                for d in d_of[s1]:
                    if d == sides[s1].identity():
                        continue
                    y1 = sides[s1].mul(x1, d)
                    y2 = sides[s2].mul(sides[s2].inv(cross[(s1, d)]), x2)
                    out.append(
                        clean(word[:i] + ((s1, y1), (s2, y2)) + word[i + 2 :])
                    )
        for i, (s, x) in enumerate(word):
            if x in d_of[s]:
                # a lone edge syllable reads on either side
                out.append(word[:i] + ((1 - s, cross[(s, x)]),) + word[i + 1 :])
        return out

    words = [()]
    nontrivial = [
        (side, x)
        for side, fac in enumerate(sides)
        for x in fac.all_elements()
        if x != fac.identity()
    ]
    frontier = [()]
    for _ in range(max_syllables):
        nxt = []
        for word in frontier:
            for syl in nontrivial:
                nxt.append(word + (syl,))
        words.extend(nxt)
        frontier = nxt

    index = {word: i for i, word in enumerate(words)}
    parent = list(range(len(words)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for word in words:
        i = index[word]
        for nb in neighbors(word):
            j = index.get(nb)
            if j is not None:
                union(i, j)
    return words, index, find
