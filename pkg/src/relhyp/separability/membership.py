"""Exact membership oracles for finitely generated subgroups, by family."""

from __future__ import annotations

from typing import Callable, Sequence

from ..errors import UnsupportedFamilyError
from ..groups import (
    Elem,
    FiniteGroup,
    FreeAbelian,
    FreeGroup,
    GroupSpec,
    RelHyp,
)
from .stallings import member, subgroup_graph


def _row_lattice_basis(rows: Sequence[Sequence[int]], cols: int):
    """Echelon basis of the integer row lattice (pivot column, row) pairs."""
    work = [list(r) for r in rows if any(r)]
    basis = []
    for col in range(cols):
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            r0 = nz[0]
            for r in nz[1:]:
                q = r[col] // r0[col]
                for i in range(cols):
                    r[i] -= q * r0[i]
            work = [r for r in work if any(r)]
        nz = [r for r in work if r[col] != 0]
        if nz:
            r0 = nz[0]
            basis.append((col, r0))
            work = [r for r in work if r is not r0]
    return basis


def lattice_contains(gens: Sequence[tuple], v: tuple) -> bool:
    """Is the integer vector v in the lattice spanned by ``gens``?

    Reduce v against an echelon basis of the row lattice; membership is
    successive divisibility at the pivots.
    """
    if not any(v):
        return True
    cols = len(v)
    basis = _row_lattice_basis(tuple(gens), cols)
    w = list(v)
    for col, row in basis:
        if w[col] % row[col] != 0:
            return False
        q = w[col] // row[col]
        for i in range(cols):
            w[i] -= q * row[i]
    return not any(w)


def membership_oracle(G: GroupSpec, gens: Sequence[Elem]) -> Callable[[Elem], bool]:
    """A callable deciding membership in the subgroup generated by ``gens``."""
    if isinstance(G, RelHyp):
        return membership_oracle(G.base, gens)
    if isinstance(G, FreeGroup):
        graph = subgroup_graph(tuple(gens), G)
        return lambda g: member(g, graph)
    if isinstance(G, FreeAbelian):
        gen_rows = tuple(tuple(g) for g in gens)
        return lambda g: lattice_contains(gen_rows, tuple(g))
    if isinstance(G, FiniteGroup):
        closure = {G.identity()}
        frontier = [G.identity()]
        moves = list(gens) + [G.inv(g) for g in gens]
        while frontier:
            nxt = []
            for v in frontier:
                for m in moves:
                    w = G.mul(v, m)
                    if w not in closure:
                        closure.add(w)
                        nxt.append(w)
            frontier = nxt
        return lambda g: g in closure
    raise UnsupportedFamilyError(
        "no membership oracle for %s subgroups" % type(G).__name__
    )
