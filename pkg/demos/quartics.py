"""Sixteen candidates, four real solutions.

Eleven quartics in two unknowns share exactly four common zeros.  Any two
generic combinations of them have sixteen.  We solve the square system,
then use a root count of twelve excess points to certify the other four.
"""

from __future__ import annotations

from overcert.certify import Label, alg_ind, square_up
from overcert.fixtures import quartics_fixture
from overcert.rootcount import RootCountInput, d_L
from overcert.solver import SolveConfig, multistart_solve


def main() -> None:
    q = quartics_fixture()
    print(f"overdetermined system: {len(q.f)} quartics in {q.f.nvars} unknowns")

    g, _ = square_up(q.f, seed=42)
    print(f"squared-up system has degrees {g.degrees}")

    S = multistart_solve(g, SolveConfig(starts=1000, seed=0))
    print(f"multistart Newton found {len(S)} certified, pairwise distinct points")

    # the excess count comes from the root count of the span of the f_i
    d = d_L(RootCountInput(q.basis, deg_psi=1))
    print(f"generic root count of the span: d_L = {d}")

    res = alg_ind(q.f, g, d, S)
    print(f"rejected {res.rejected} as nonsolutions of f")
    for cc in res.classified:
        if cc.label is Label.CertifiedSolutionOfF:
            z = [complex(x) for x in cc.candidate.point]
            print(f"  certified solution near ({z[0].real:+.6f}, {z[1].real:+.6f})")


if __name__ == "__main__":
    main()
