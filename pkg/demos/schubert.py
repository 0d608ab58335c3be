"""Lines meeting four (or more) general subspaces.

For m given (m-1)-planes in C^(m+2), the 2-planes meeting all of them are
counted by a Kostka number, while a natural square subsystem has a
Catalan number of solutions.  Three independent routes pick out the true
solutions among the Catalan many.
"""

from __future__ import annotations

import argparse

from overcert.certify import LiaisonChainSpec, alg_ind, alg_set, liaison_chain
from overcert.fixtures import catalan, kostka, schubert_fixture
from overcert.solver import SolveConfig, multistart_solve


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    m, seed = args.m, args.seed

    inst = schubert_fixture(m, seed)
    print(f"m={m}: {len(inst.f)} equations in {inst.f.nvars} unknowns, "
          f"expect {kostka(m)} solutions among {catalan(m)}")

    cfg = SolveConfig(starts=2000, seed=seed, box_radius=10)
    S = multistart_solve(inst.g, cfg)
    S2 = multistart_solve(inst.g_prime, cfg)
    print(f"solved both square subsystems: {len(S)} and {len(S2)} points")

    ind = alg_ind(inst.f, inst.g, inst.d, S, max_reject_steps=20)
    print(f"by counting: {ind.rejected} rejected, {len(ind.certified)} certified")

    st = alg_set(catalan(m), kostka(m), inst.f, inst.g, inst.g_prime, S, S2)
    print(f"by intersecting two subsystems: {st.verdict}, {len(st.T)} shared")

    ch = liaison_chain(LiaisonChainSpec(inst.breakpoints, inst.g, inst.h), S)
    print(f"by a liaison chain: {len(ch.survivors)} survive every block")


if __name__ == "__main__":
    main()
