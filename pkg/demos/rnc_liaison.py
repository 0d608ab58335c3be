"""Peeling a secant line off a twisted cubic.

The first two equations cut out a rational normal curve together with one
of its secant lines.  A plane meets this union in four points.  Liaison
tells the curve points from the line point without knowing the curve's
ideal.
"""

from __future__ import annotations

from overcert.certify import liaison_classify
from overcert.fixtures import rnc_fixture
from overcert.newton import certify_candidate
from overcert.solver import SolveConfig, multistart_solve


def show(tag, items):
    for cc in items:
        z = ", ".join(f"{complex(x):.4g}" for x in cc.candidate.point)
        print(f"  {tag}: ({z})")


def main() -> None:
    r = rnc_fixture()
    S = multistart_solve(r.g, SolveConfig(starts=300, seed=1, box_radius=3))
    print(f"{len(S)} points on the plane section of curve and line")

    res = liaison_classify(2, r.g, r.h, S)
    print("floating point verdicts:")
    show("line (U)", res.U)
    show("curve (T)", res.T)

    # the same split, with every bound recomputed in rational arithmetic
    exact = liaison_classify(2, r.g, r.h, [certify_candidate(r.g, c.to_exact()) for c in S])
    print(f"exact rerun: {len(exact.U)} on the line, {len(exact.T)} on the curve, "
          f"{len(exact.undetermined)} undetermined")


if __name__ == "__main__":
    main()
