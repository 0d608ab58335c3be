"""Counting roots with a Khovanskii basis.

The span of the eleven quartics is not generated in degree one: two extra
elements are needed.  With them the value semigroup is verified, the
Newton-Okounkov body is a polygon of area 6, and the root count is 12.
"""

from __future__ import annotations

from overcert.fixtures import ahs18_fixture, quartics_fixture
from overcert.rootcount import RootCountInput, khovanskii_verify, root_count


def main() -> None:
    q = quartics_fixture()
    partial = [b for b in q.basis if b.level != 2]
    print("without the level-2 element:", khovanskii_verify(RootCountInput(partial, degree_bound=6)))
    print("full basis:", khovanskii_verify(RootCountInput(q.basis, degree_bound=6)))

    rep = root_count(RootCountInput(q.basis), bezout=16)
    print("body vertices:", ", ".join("(" + ", ".join(map(str, v)) + ")" for v in sorted(rep.body.vertices)))
    print(f"area {rep.volume}, lattice index {rep.index}, d_L = {rep.d_L}")

    a = ahs18_fixture()
    rep = root_count(RootCountInput(a.basis, deg_psi=a.deg_psi))
    print(f"three-variable example: volume {rep.volume}, index {rep.index}, "
          f"Kodaira degree {rep.deg_psi}, d_L = {rep.d_L}")


if __name__ == "__main__":
    main()
