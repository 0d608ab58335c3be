"""Multi-start damped Newton for small square systems.

Stands in for homotopy continuation at desk scale: random starts in a
poly-disc, damped Newton on all starts at once, then certification and
deduplication of the limits.

Roots far from the origin have tiny basins in the affine chart.  A second
pass therefore runs Newton on the homogenized system restricted to a random
affine patch ``a . (w0, w) = 1`` and maps the limits back by ``z = w / w0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import BudgetExhausted, NotSquare, SingularJacobian
from .newton import Candidate, certify_with_fallback, distinct, separate_all
from .poly import Polynomial, PolySystem

log = logging.getLogger(__name__)

RNG_NAME = "numpy.Philox"


@dataclass(frozen=True)
class SolveConfig:
    starts: int = 1000
    seed: int = 0
    box_radius: float = 10.0
    max_iters: int = 80
    dedup: bool = True
    max_halvings: int = 20
    tol: float = 1e-12
    projective: bool = True

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be positive")
        if not self.box_radius > 0:
            raise ValueError("box_radius must be positive")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _starts(n: int, cfg: SolveConfig) -> np.ndarray:
    rng = make_rng(cfg.seed)
    r = cfg.box_radius * np.sqrt(rng.random((cfg.starts, n)))
    theta = 2 * np.pi * rng.random((cfg.starts, n))
    return r * np.exp(1j * theta)


def _newton_dirs(J: np.ndarray, V: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.solve(J, V[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum("sij,sj->si", np.linalg.pinv(J), V)


def damped_newton(g: PolySystem, Z: np.ndarray, cfg: SolveConfig) -> np.ndarray:
    """Run damped Newton on every row of ``Z``; returns converged limits."""
    num = g.floated.numeric
    Z = np.array(Z, dtype=complex)
    active = np.ones(len(Z), dtype=bool)
    done = np.zeros(len(Z), dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(cfg.max_iters):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            V, J = num.eval_jac(Z[idx])
            res = np.linalg.norm(V, axis=1)
            D = _newton_dirs(J, V)
            step = np.ones(idx.size)
            accepted = np.zeros(idx.size, dtype=bool)
            trial = Z[idx] - D
            for _h in range(cfg.max_halvings + 1):
                todo = ~accepted
                if not todo.any():
                    break
                newres = np.linalg.norm(num.eval(trial[todo]), axis=1)
                ok = np.isfinite(newres) & (newres <= res[todo])
                pos = np.flatnonzero(todo)
                accepted[pos[ok]] = True
                retry = pos[~ok]
                step[retry] /= 2
                trial[retry] = Z[idx[retry]] - step[retry, None] * D[retry]
            moved = np.linalg.norm(step[:, None] * D, axis=1)
            Z[idx[accepted]] = trial[accepted]
            scale = 1 + np.linalg.norm(Z[idx], axis=1)
            bad = ~np.all(np.isfinite(Z[idx]), axis=1) | (scale > 1e8) | ~accepted
            conv = accepted & (moved <= cfg.tol * scale) & (step == 1)
            done[idx[conv]] = True
            active[idx[conv | bad]] = False
    return Z[done]


def patch_system(g: PolySystem, rng: np.random.Generator) -> PolySystem:
    """Homogenized ``g`` in ``(w0, w)`` plus a random unit-modulus linear patch."""
    n = g.nvars
    polys = []
    for p in g.floated:
        d = p.degree
        polys.append(Polynomial(n + 1, {(d - sum(e),) + e: c for e, c in p.terms.items()}))
    a = np.exp(2j * np.pi * rng.random(n + 1))
    patch = {tuple(int(k == j) for k in range(n + 1)): complex(a[j]) for j in range(n + 1)}
    patch[(0,) * (n + 1)] = -1.0 + 0j
    polys.append(Polynomial(n + 1, patch))
    return PolySystem(polys)


def _projective_limits(g: PolySystem, cfg: SolveConfig) -> np.ndarray:
    # an independent stream so the affine pass is unchanged by this one
    rng = make_rng(cfg.seed + 0x5A5A5A5A)
    G = patch_system(g, rng)
    m = g.nvars + 1
    W = np.sqrt(rng.random((cfg.starts, m))) * np.exp(2j * np.pi * rng.random((cfg.starts, m)))
    L = damped_newton(G, W, cfg)
    finite = np.abs(L[:, 0]) > 1e-10 * np.linalg.norm(L, axis=1)
    Z = L[finite, 1:] / L[finite, :1]
    keep = np.all(np.isfinite(Z), axis=1) & (np.linalg.norm(Z, axis=1) < 1e8)
    return Z[keep]


def _cluster(P: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    reps: List[np.ndarray] = []
    for p in P:
        if all(np.linalg.norm(p - q) > tol * (1 + np.linalg.norm(q)) for q in reps):
            reps.append(p)
    return np.array(reps).reshape(len(reps), P.shape[1])


def sort_key(c: Candidate):
    return tuple((round(complex(x).real, 8), round(complex(x).imag, 8)) for x in c.point)


def multistart_solve(g: PolySystem, cfg: SolveConfig = SolveConfig(), system_id: str = "") -> List[Candidate]:
    """Certified, pairwise-distinct solutions found from random starts."""
    if not g.is_square:
        raise NotSquare(f"{len(g)} polynomials in {g.nvars} variables")
    gf = g.floated
    limits = damped_newton(gf, _starts(g.nvars, cfg), cfg)
    if cfg.projective:
        limits = np.vstack([limits, _projective_limits(gf, cfg)])
    reps = _cluster(limits) if cfg.dedup else limits
    found: List[Candidate] = []
    for p in reps:
        try:
            c = certify_with_fallback(g, tuple(complex(x) for x in p), source_system_id=system_id)
        except SingularJacobian:
            continue
        if c.certified:
            found.append(c)
    if cfg.dedup and found:
        try:
            found = separate_all(g, found)
        except BudgetExhausted:
            log.warning("separation budget exhausted; keeping a greedy distinct subset")
            kept: List[Candidate] = []
            for c in found:
                if all(distinct(c, k) for k in kept):
                    kept.append(c)
            found = kept
    found.sort(key=sort_key)
    log.info("multistart: %d starts, %d limits, %d certified", cfg.starts, len(limits), len(found))
    return found


def count_reached(g: PolySystem, cfg: SolveConfig, expected: int) -> bool:
    return len(multistart_solve(g, cfg)) == expected
