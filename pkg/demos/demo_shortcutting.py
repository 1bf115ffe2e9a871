"""Shortcutting a broken line, step by step.

A broken line that backtracks through a peripheral coset is replaced by a
path that crosses the coset once: the marked vertex spans V, the bridging
peripheral edges, and the rejoining geodesics are all shown below, together
with the tamability verdicts that control when the output is a uniform
quasigeodesic.

Run: python3 demos/demo_shortcutting.py
"""

from relhyp import FreeGroup, PeripheralSpec, RelHyp, word_to_elem
from relhyp.cayley import BrokenLine, relative_view
from relhyp.geometry import is_quasigeodesic
from relhyp.shortcut import is_tamable, shortcut, verify_shortcut_proposition

F = FreeGroup(("a", "b"))
VIEW = relative_view(RelHyp(F, (PeripheralSpec(0, "cyclic-generator", "a"),)))


def describe(bl, theta):
    res = shortcut(bl, theta)
    res.check_invariants()
    print("  theta = %d" % theta)
    print("    V = %s" % (list(map(list, res.V)),))
    sigma = res.sigma.whole_path()
    labels = []
    for lab in sigma.labels:
        labels.append(
            F.elem_str(lab[1]) if lab[0] == "x" else "[H: %s]" % F.elem_str(lab[2])
        )
    print("    sigma = %s   (relative length %d)" % ("  ".join(labels) or "(trivial)", len(sigma)))
    print("    (1,0)-quasigeodesic: %s" % is_quasigeodesic(sigma, 1, 0).ok)


def main():
    w = lambda s: word_to_elem(s, F)
    a5 = w("a a a a a")
    a10 = F.mul(a5, a5)
    bl = BrokenLine.from_nodes(VIEW, [F.identity(), a5, a10])
    print("two geodesic segments 1 -> a^5 -> a^10 (consecutive backtracking")
    print("through the coset <a>, components of X-length 5 and 5):")
    describe(bl, 5)
    describe(bl, 6)

    print()
    print("tamability of the same line, sweeping zeta at theta = 5:")
    for zeta in (5, 10, 11, 20):
        verdict = is_tamable(bl, 0, 10, zeta, 5)
        print(
            "  zeta = %-2d  tamable: %s%s"
            % (zeta, verdict.ok, "" if verdict.ok else "  (failing condition %s)" % verdict.failing[0])
        )

    print()
    print("the full harness report at theta = 5, (lambda, c) = (1, 0), eta = 5:")
    rep = verify_shortcut_proposition(bl, 5, 1, 0, 5, tamability=(0, 10, 10))
    print("  bridging edges nontrivial: %s" % rep.all_e_nontrivial)
    print("  sigma quasigeodesic:       %s" % rep.quasigeodesic.ok)
    print("  without backtracking:      %s" % rep.without_backtracking)
    print("  component X-lengths >= eta: %s %s" % (rep.eta_ok, rep.eta_values))
    print("  tamable:                   %s" % rep.tamable.ok)
    print("  contract violation:        %s" % rep.violation)


if __name__ == "__main__":
    main()
