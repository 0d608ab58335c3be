"""Checking a published five-point relative pose.

Five point correspondences and the essential-matrix cubics give a square
system in eight chart coordinates.  We certify the rounded estimate, then
refine it in rational arithmetic and show it avoids the degenerate locus.
"""

from __future__ import annotations

from overcert.fixtures import essential_fixture
from overcert.newton import certify_candidate, certify_square, refine
from overcert.residual import residual_report


def main() -> None:
    e = essential_fixture()
    print(f"square system: degrees {e.g.degrees}")
    print(f"e33 of the estimate: {e.E_hat[2, 2]:g}")

    cert = certify_square(e.g, e.E_hat_exact)
    print(f"exact alpha test: alpha <= {float(cert.alpha_upper):.3e}, certified={cert.certified}")

    c = refine(e.g, certify_candidate(e.g, e.E_hat_exact), 2)
    print(f"after two exact Newton steps the radius is {float(c.rho):.2e}")

    rep = residual_report(e.exclusion_polys, c)
    for i, v in rep.per_poly:
        print(f"  exclusion polynomial {i + 1}: residual {float(v):.6f} > 0")
    print("the associated solution is a genuine essential matrix")


if __name__ == "__main__":
    main()
