"""The ``overcert`` command line tool.

Every subcommand writes ``results.json`` and ``manifest.json`` into the
output directory.  Exit codes: 0 full success, 1 usage or input error,
2 algorithmic failure, 3 undetermined candidates remain.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from functools import partial
from typing import List, Optional, Sequence

from . import fixtures
from .certify import (
    ClassifiedCandidate,
    Label,
    LiaisonChainSpec,
    alg_ind,
    alg_set,
    liaison_chain,
    liaison_classify,
    parallel_map,
    square_up,
)
from .errors import OvercertError
from .formats import (
    basis_to_json,
    candidates_to_json,
    order_text,
    parse_basis,
    parse_candidates,
    parse_order,
    parse_system,
    point_to_json,
    system_to_json,
    write_json,
)
from .newton import DEFAULT_BUDGET, Candidate, certify_candidate, certify_square, certify_with_fallback
from .poly import PolySystem, bezout_bound
from .residual import Rejected, refine_and_reject, residual_report
from .rootcount import FailsAt, RootCountInput, khovanskii_verify, root_count
from .solver import RNG_NAME, SolveConfig, multistart_solve

log = logging.getLogger("overcert")

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_UNDETERMINED = 0, 1, 2, 3
ENV_MODE = "OVERCERT_DEFAULT_MODE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract reserves 2 for FAIL
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "unknown"


# helpers -------------------------------------------------------------------------------

def _mode(args) -> str:
    if args.exact:
        return "exact"
    if args.soft:
        return "soft"
    mode = os.environ.get(ENV_MODE, "soft").strip().lower() or "soft"
    if mode not in ("soft", "exact"):
        raise UsageError(f"{ENV_MODE} must be 'soft' or 'exact', got {mode!r}")
    return mode


def _system(path: str, mode: str) -> PolySystem:
    g = parse_system(path)
    return g.to_exact() if mode == "exact" and not g.exact else g


def _points(path: str, mode: str) -> List[Candidate]:
    cands = parse_candidates(path)
    return [c.to_exact() if mode == "exact" else c.to_float() for c in cands]


def _certified(g: PolySystem, path: str, mode: str) -> List[Candidate]:
    out = []
    for i, c in enumerate(_points(path, mode)):
        c = certify_candidate(g, c) if mode == "exact" else certify_with_fallback(g, c)
        if not c.certified:
            raise UsageError(f"candidate {i} of {path} is not an approximate solution of g: "
                             f"{c.certificate.diagnostic or 'alpha test failed'}")
        out.append(c)
    return out


def _rho_text(c: Candidate):
    return None if c.rho is None else str(c.rho)


def _classified_record(k: int, cc: ClassifiedCandidate) -> dict:
    rec = {
        "index": k,
        "point": point_to_json(cc.candidate.point),
        "rho": _rho_text(cc.candidate),
        "label": cc.label.value,
        "witness": cc.witness,
    }
    if cc.report is not None:
        rec["residual"] = cc.report.to_record()
    if cc.certificate is not None:
        rec["certificate"] = cc.certificate.to_record()
    return rec


def _index_of(cc: ClassifiedCandidate) -> Optional[int]:
    src = cc.candidate.source_system_id
    return int(src) if src.isdigit() else None


def _tag(S: Sequence[Candidate]) -> List[Candidate]:
    # remember input positions through refinement
    return [replace(c, source_system_id=str(i)) for i, c in enumerate(S)]


# subcommands ------------------------------------------------------------------------------

def cmd_certify_square(args, mode):
    g = _system(args.g, mode)
    recs, verdicts = [], []
    for i, c in enumerate(_points(args.candidates, mode)):
        cert = certify_square(g, c.point)
        recs.append({"index": i, "point": point_to_json(c.point), "certificate": cert.to_record()})
        verdicts.append("Certified" if cert.certified else "Undetermined")
    code = EXIT_OK if all(v == "Certified" for v in verdicts) else EXIT_UNDETERMINED
    return code, {"certificates": recs}, verdicts


def _reject_task(f, g, steps, c):
    if steps > 0:
        return refine_and_reject(f, g, c, steps)
    rep = residual_report(f, c)
    return Rejected(rep, 0, c) if rep.rejected else None


def cmd_reject(args, mode):
    f, g = _system(args.f, mode), _system(args.g, mode)
    S = _certified(g, args.candidates, mode)
    outs = parallel_map(partial(_reject_task, f, g, args.max_reject_steps), S, args.jobs)
    recs, verdicts = [], []
    for i, (c, o) in enumerate(zip(S, outs)):
        if isinstance(o, Rejected):
            cc = ClassifiedCandidate(o.candidate, Label.CertifiedNonsolution, o.report.witness, o.report)
        else:
            cc = ClassifiedCandidate(getattr(o, "candidate", c), Label.Undetermined)
        recs.append(_classified_record(i, cc))
        verdicts.append(cc.label.value)
    code = EXIT_OK if all(v == Label.CertifiedNonsolution.value for v in verdicts) else EXIT_UNDETERMINED
    return code, {"classified": recs}, verdicts


def cmd_certify_ind(args, mode):
    f, g = _system(args.f, mode), _system(args.g, mode)
    S = _certified(g, args.candidates, mode)
    res = alg_ind(f, g, args.d, S, max_reject_steps=args.max_reject_steps, jobs=args.jobs)
    recs = [_classified_record(i, cc) for i, cc in enumerate(res.classified)]
    verdicts = [cc.label.value for cc in res.classified]
    body = {"d": args.d, "rejected": res.rejected, "success": res.success,
            "certified": len(res.certified), "classified": recs}
    if not res.certified:
        code = EXIT_FAIL
    elif any(cc.label is Label.Undetermined for cc in res.classified):
        code = EXIT_UNDETERMINED
    else:
        code = EXIT_OK
    return code, body, verdicts


def cmd_certify_set(args, mode):
    f, g, gp = _system(args.f, mode), _system(args.g, mode), _system(args.g_prime, mode)
    S = _certified(g, args.candidates, mode)
    Sp = _certified(gp, args.candidates_prime, mode)
    res = alg_set(args.d, args.e, f, g, gp, S, Sp, budget=args.budget)
    body = {"d": args.d, "e": args.e, "verdict": res.verdict, "reason": res.reason,
            "T": [_classified_record(i, cc) for i, cc in enumerate(res.T)]}
    verdicts = [res.verdict]
    return (EXIT_OK if res.certified else EXIT_FAIL), body, verdicts


def cmd_liaison(args, mode):
    g, h = _system(args.g, mode), _system(args.h, mode)
    S = _tag(_certified(g, args.candidates, mode))
    if args.breakpoints:
        bps = tuple(int(x) for x in args.breakpoints.split(","))
        res = liaison_chain(LiaisonChainSpec(bps, g, h), S, budget=args.budget)
        body = {
            "breakpoints": list(bps),
            "survivors": [_classified_record(_index_of(cc), cc) for cc in res.survivors],
            "discarded": [[_classified_record(_index_of(cc), cc) for cc in blk] for blk in res.discarded],
            "undetermined": [_classified_record(_index_of(cc), cc) for cc in res.undetermined],
        }
        verdicts = ["survivor"] * len(res.survivors) + ["undetermined"] * len(res.undetermined)
        und = res.undetermined
    else:
        r = args.r if args.r is not None else len(h)
        res = liaison_classify(r, g, list(h.polys)[:r], S, budget=args.budget)
        body = {
            "r": r,
            "T": [_classified_record(_index_of(cc), cc) for cc in res.T],
            "U": [_classified_record(_index_of(cc), cc) for cc in res.U],
            "undetermined": [_classified_record(_index_of(cc), cc) for cc in res.undetermined],
        }
        verdicts = ["T"] * len(res.T) + ["U"] * len(res.U) + ["undetermined"] * len(res.undetermined)
        und = res.undetermined
    return (EXIT_UNDETERMINED if und else EXIT_OK), body, verdicts


def cmd_squareup(args, mode):
    f = _system(args.f, mode)
    g, A = square_up(f, seed=args.seed)
    write_json(os.path.join(args.output, "g.json"), system_to_json(g))
    body = {"seed": args.seed, "matrix": [[str(a) for a in row] for row in A],
            "degrees": list(g.degrees), "bezout": bezout_bound(g), "system": "g.json"}
    return EXIT_OK, body, []


def cmd_solve(args, mode):
    g = _system(args.g, mode)
    cfg = SolveConfig(starts=args.starts, seed=args.seed, box_radius=args.box_radius)
    S = multistart_solve(g, cfg)
    if mode == "exact":
        S = [certify_candidate(g, c.to_exact()) for c in S]
        S = [c for c in S if c.certified]
    write_json(os.path.join(args.output, "candidates.json"), candidates_to_json(S, g.nvars))
    body = {"rng": RNG_NAME, "starts": cfg.starts, "box_radius": cfg.box_radius,
            "found": len(S), "bezout": bezout_bound(g), "candidates": "candidates.json"}
    return EXIT_OK, body, ["Certified"] * len(S)


def cmd_rootcount(args, mode):
    basis, order, deg_psi = parse_basis(args.basis)
    if args.order:
        order = parse_order(args.order)
    if args.deg_psi is not None:
        deg_psi = args.deg_psi
    inp = RootCountInput(basis, order, deg_psi or 1, args.bound)
    check = khovanskii_verify(inp)
    body = {"order": order_text(order), "bound": inp.bound, "deg_psi": inp.deg_psi}
    if isinstance(check, FailsAt):
        body["verification"] = {"verified": False, "level": check.level, "exponent": list(check.exponent),
                                "missing": [list(e) for e in check.missing]}
        return EXIT_FAIL, body, ["FAIL"]
    rep = root_count(inp, bezout=args.bezout, verify=False)
    body.update({
        "verification": {"verified": True, "up_to": check.degree},
        "vertices": [[str(x) for x in v] for v in rep.body.vertices],
        "volume": str(rep.volume),
        "lattice_index": rep.index,
        "d_L": rep.d_L,
    })
    return EXIT_OK, body, [f"d_L={rep.d_L}"]


def _examples_files(args) -> dict:
    name = args.name
    if name == "quartics":
        q = fixtures.quartics_fixture()
        return {
            "system.json": system_to_json(q.f),
            "basis.json": basis_to_json(q.basis, q.f.names, deg_psi=1),
            "candidates-template.json": candidates_to_json(q.solutions),
            "expected.json": {"d_L": 12, "solutions": [point_to_json(p) for p in q.solutions],
                              "squareup_seed": 42, "d": 12},
        }
    if name == "ahs18":
        a = fixtures.ahs18_fixture()
        return {
            "system.json": system_to_json(a.f),
            "basis.json": basis_to_json(a.basis, a.f.names, deg_psi=a.deg_psi),
            "expected.json": {"d_L": 2, "volume": "1/6", "lattice_index": 1},
        }
    if name == "rnc":
        r = fixtures.rnc_fixture()
        return {
            "g.json": system_to_json(r.g),
            "h.json": system_to_json(r.h),
            "candidates-template.json": candidates_to_json(r.line_solutions + r.curve_solutions),
            "expected.json": {"U": [point_to_json(p) for p in r.line_solutions],
                              "T": [point_to_json(p) for p in r.curve_solutions], "r": 2},
        }
    if name == "schubert":
        s = fixtures.schubert_fixture(args.m, args.seed)
        return {
            "system.json": system_to_json(s.f),
            "g.json": system_to_json(s.g),
            "g_prime.json": system_to_json(s.g_prime),
            "h.json": system_to_json(s.h),
            "candidates-template.json": {"mode": "soft", "nvars": s.g.nvars, "candidates": []},
            "expected.json": {"m": s.m, "seed": s.seed, "d": s.d, "e": s.e,
                              "set_d": fixtures.catalan(s.m), "catalan": fixtures.catalan(s.m),
                              "breakpoints": list(s.breakpoints)},
        }
    if name == "essential":
        e = fixtures.essential_fixture()
        return {
            "g.json": system_to_json(e.g),
            "exclusion.json": system_to_json(e.exclusion_polys),
            "candidates-template.json": candidates_to_json([e.E_hat_exact]),
            "expected.json": {"bezout": bezout_bound(e.g), "certified": True, "exclusion_positive": True},
        }
    raise UsageError(f"unknown example {name!r}")


def cmd_examples(args, mode):
    files = _examples_files(args)
    for fname, doc in files.items():
        write_json(os.path.join(args.output, fname), doc)
    return EXIT_OK, {"example": args.name, "files": sorted(files)}, []


# parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="overcert", description="Certify solutions of overdetermined polynomial systems.")
    p.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    common = _Parser(add_help=False)
    m = common.add_mutually_exclusive_group()
    m.add_argument("--exact", action="store_true", help="hard certificates in rational arithmetic")
    m.add_argument("--soft", action="store_true", help="floating point certificates (default)")
    common.add_argument("-o", "--output", default="overcert-out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("certify-square", cmd_certify_square, "alpha test for candidates of a square system")
    sp.add_argument("--g", required=True)
    sp.add_argument("--candidates", required=True)

    sp = add("reject", cmd_reject, "Taylor-residual rejection of candidates")
    for flag in ("--f", "--g", "--candidates"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--max-reject-steps", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("certify-ind", cmd_certify_ind, "certify solutions when the excess count d is known")
    for flag in ("--f", "--g", "--candidates"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--max-reject-steps", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)

    sp = add("certify-set", cmd_certify_set, "certify a solution set from two square subsystems")
    for flag in ("--f", "--g", "--g-prime", "--candidates", "--candidates-prime"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--e", type=int, required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    sp = add("liaison", cmd_liaison, "split candidates along a linked component")
    for flag in ("--g", "--h", "--candidates"):
        sp.add_argument(flag, required=True)
    sp.add_argument("--r", type=int)
    sp.add_argument("--breakpoints", help="comma separated, e.g. 0,2,4 for a chain")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)

    sp = add("squareup", cmd_squareup, "random square subsystem g = A f")
    sp.add_argument("--f", required=True)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("solve", cmd_solve, "multistart Newton solve of a square system")
    sp.add_argument("--g", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--starts", type=int, default=1000)
    sp.add_argument("--box-radius", type=float, default=10.0)

    sp = add("rootcount", cmd_rootcount, "Khovanskii check and root count d_L")
    sp.add_argument("--basis", required=True)
    sp.add_argument("--deg-psi", type=int)
    sp.add_argument("--bound", type=int)
    sp.add_argument("--order", help="grevlex or lex, optionally with :i,j,k variable ranking")
    sp.add_argument("--bezout", type=int, help="advisory upper bound to check against")

    sp = add("examples", cmd_examples, "write fixture files")
    sp.add_argument("name", choices=["quartics", "rnc", "schubert", "essential", "ahs18"])
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--seed", type=int, default=1)
    return p


def _budgets(args) -> dict:
    keys = ("budget", "max_reject_steps", "starts", "bound", "jobs")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        mode = _mode(args)
        code, body, verdicts = args.func(args, mode)
    except (UsageError, OvercertError, OSError) as err:
        print(f"overcert {args.command}: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_USAGE
    manifest = {
        "command": ["overcert"] + argv,
        "subcommand": args.command,
        "mode": mode,
        "seeds": {"seed": args.seed} if hasattr(args, "seed") else {},
        "budgets": _budgets(args),
        "version": _version(),
        "verdicts": verdicts,
        "exit_code": code,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    body = dict(body, mode=mode, exit_code=code)
    write_json(os.path.join(args.output, "results.json"), body)
    write_json(os.path.join(args.output, "manifest.json"), manifest)
    print(f"overcert {args.command}: exit {code}; results in {os.path.join(args.output, 'results.json')}")
    return code


if __name__ == "__main__":
    sys.exit(main())
