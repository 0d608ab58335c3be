"""JSON file formats for systems, candidates, bases, results and manifests.

A system file looks like::

    {"mode": "exact", "nvars": 2, "vars": ["z1", "z2"],
     "polys": [{"terms": [{"c": "3/2", "e": [1, 1]},
                          {"c": {"re": "0", "im": "-1"}, "e": [0, 0]}]}]}

Scalars are strings.  In exact mode they are rationals (``"p/q"`` or a
terminating decimal read exactly); in soft mode they are decimal floats.
A complex scalar is ``{"re": ..., "im": ...}``.  A missing ``mode`` means
exact.  Serialization is canonical: lowest terms, real values as bare
strings, terms sorted descending in the file's monomial order.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import NonFiniteFloat, SchemaError
from .newton import Candidate
from .poly import GREVLEX, MonomialOrder, Polynomial, PolySystem
from .rootcount import GradedElement
from .scalar import QI

MODES = ("exact", "soft")


# scalars -----------------------------------------------------------------------

def _real_text(x, exact: bool) -> str:
    if exact:
        return str(Fraction(x))
    x = float(x)
    if not math.isfinite(x):
        raise NonFiniteFloat(f"non-finite value {x}")
    return repr(x)


def scalar_to_json(c) -> Any:
    if isinstance(c, QI):
        return str(c.re) if not c.im else {"re": str(c.re), "im": str(c.im)}
    if isinstance(c, (int, Fraction)):
        return str(Fraction(c))
    c = complex(c)
    if not c.imag:
        return _real_text(c.real, False)
    return {"re": _real_text(c.real, False), "im": _real_text(c.imag, False)}


def _parse_real(s, exact: bool, where: str):
    if not isinstance(s, str):
        raise SchemaError(f"{where}: scalar must be a string, got {type(s).__name__}")
    try:
        if exact:
            return Fraction(s.strip())
        x = float(Fraction(s.strip())) if "/" in s else float(s)
    except (ValueError, ZeroDivisionError) as err:
        raise SchemaError(f"{where}: cannot read {s!r} as a number ({err})") from None
    if not math.isfinite(x):
        raise NonFiniteFloat(f"{where}: non-finite value {s!r}")
    return x


def scalar_from_json(v, exact: bool, where: str = "scalar"):
    if isinstance(v, dict):
        if set(v) != {"re", "im"}:
            raise SchemaError(f"{where}: complex scalar needs exactly the keys 're' and 'im'")
        re = _parse_real(v["re"], exact, where + ".re")
        im = _parse_real(v["im"], exact, where + ".im")
    else:
        re, im = _parse_real(v, exact, where), 0
    return QI(re, im) if exact else complex(re, im)


def _mode(doc: dict, where: str) -> bool:
    mode = doc.get("mode", "exact")
    if mode not in MODES:
        raise SchemaError(f"{where}: mode must be one of {MODES}, got {mode!r}")
    return mode == "exact"


def _need(doc: dict, key: str, kind, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing field {key!r}")
    v = doc[key]
    if not isinstance(v, kind) or isinstance(v, bool):
        raise SchemaError(f"{where}.{key}: wrong type {type(v).__name__}")
    return v


# polynomials and systems ------------------------------------------------------------

def parse_order(text: str) -> MonomialOrder:
    """``grevlex`` or ``lex``, optionally followed by ``:2,0,1`` (variables from largest)."""
    kind, _, rest = text.partition(":")
    var_order = tuple(int(x) for x in rest.split(",")) if rest else None
    try:
        return MonomialOrder(kind.strip(), var_order)
    except ValueError as err:
        raise SchemaError(str(err)) from None


def order_text(order: MonomialOrder) -> str:
    if order.variable_order is None:
        return order.kind
    return order.kind + ":" + ",".join(str(v) for v in order.variable_order)


def poly_to_json(p: Polynomial, order: MonomialOrder = GREVLEX) -> dict:
    return {"terms": [{"c": scalar_to_json(p.terms[e]), "e": list(e)} for e in order.sorted(p.terms)]}


def poly_from_json(doc, nvars: int, exact: bool, where: str) -> Polynomial:
    terms: Dict[tuple, Any] = {}
    for k, t in enumerate(_need(doc, "terms", list, where)):
        tw = f"{where}.terms[{k}]"
        e = _need(t, "e", list, tw)
        if len(e) != nvars:
            raise SchemaError(f"{tw}.e: exponent has length {len(e)}, expected {nvars}")
        if any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in e):
            raise SchemaError(f"{tw}.e: exponents must be non-negative integers")
        if "c" not in t:
            raise SchemaError(f"{tw}: missing field 'c'")
        c = scalar_from_json(t["c"], exact, tw + ".c")
        e = tuple(e)
        terms[e] = terms[e] + c if e in terms else c
    return Polynomial(nvars, terms)


def _header(doc: dict, where: str) -> Tuple[int, Optional[List[str]], bool]:
    nvars = _need(doc, "nvars", int, where)
    if nvars < 1:
        raise SchemaError(f"{where}.nvars: must be positive")
    names = doc.get("vars")
    if names is not None and (not isinstance(names, list) or len(names) != nvars):
        raise SchemaError(f"{where}.vars: expected a list of {nvars} names")
    return nvars, names, _mode(doc, where)


def system_from_json(doc: dict, where: str = "system") -> PolySystem:
    nvars, names, exact = _header(doc, where)
    polys = [poly_from_json(p, nvars, exact, f"{where}.polys[{i}]")
             for i, p in enumerate(_need(doc, "polys", list, where))]
    if not polys:
        raise SchemaError(f"{where}.polys: empty system")
    return PolySystem(polys, names)


def system_to_json(sys: PolySystem, order: MonomialOrder = GREVLEX) -> dict:
    return {
        "mode": "exact" if sys.exact else "soft",
        "nvars": sys.nvars,
        "vars": list(sys.names),
        "order": order_text(order),
        "polys": [poly_to_json(p, order) for p in sys.polys],
    }


# candidates ----------------------------------------------------------------------

def point_to_json(z, exact: Optional[bool] = None) -> list:
    if exact is False:
        z = [complex(x) for x in z]
    return [scalar_to_json(x) for x in z]


def candidates_to_json(cands: Sequence, nvars: Optional[int] = None) -> dict:
    pts = [c.point if isinstance(c, Candidate) else tuple(c) for c in cands]
    exact = bool(pts) and all(isinstance(x, (QI, int, Fraction)) for p in pts for x in p)
    out = []
    for c, p in zip(cands, pts):
        rec: Dict[str, Any] = {"point": point_to_json(p, exact)}
        if isinstance(c, Candidate) and c.rho is not None:
            rec["rho"] = _real_text(c.rho, exact and isinstance(c.rho, Fraction))
        out.append(rec)
    n = nvars if nvars is not None else (len(pts[0]) if pts else 0)
    return {"mode": "exact" if exact else "soft", "nvars": n, "candidates": out}


def candidates_from_json(doc: dict, where: str = "candidates") -> List[Candidate]:
    """Points only; radii are recomputed by certification, never trusted from disk."""
    nvars, _, exact = _header(doc, where)
    out = []
    for i, rec in enumerate(_need(doc, "candidates", list, where)):
        cw = f"{where}.candidates[{i}]"
        pt = _need(rec, "point", list, cw)
        if len(pt) != nvars:
            raise SchemaError(f"{cw}.point: {len(pt)} coordinates, expected {nvars}")
        out.append(Candidate(tuple(scalar_from_json(x, exact, f"{cw}.point[{k}]") for k, x in enumerate(pt))))
    return out


# Khovanskii bases ---------------------------------------------------------------------

def basis_to_json(basis: Sequence[GradedElement], names: Optional[Sequence[str]] = None,
                  order: MonomialOrder = GREVLEX, deg_psi: Optional[int] = None) -> dict:
    nvars = basis[0].poly.nvars
    doc: Dict[str, Any] = {
        "mode": "exact",
        "nvars": nvars,
        "vars": list(names) if names else [f"z{k + 1}" for k in range(nvars)],
        "order": order_text(order),
        "elements": [dict(level=b.level, **poly_to_json(b.poly, order)) for b in basis],
    }
    if deg_psi is not None:
        doc["deg_psi"] = deg_psi
    return doc


def basis_from_json(doc: dict, where: str = "basis") -> Tuple[List[GradedElement], MonomialOrder, Optional[int]]:
    nvars, _, exact = _header(doc, where)
    if not exact:
        raise SchemaError(f"{where}: Khovanskii bases must be exact")
    order = parse_order(doc.get("order", "grevlex"))
    elems = []
    for i, rec in enumerate(_need(doc, "elements", list, where)):
        ew = f"{where}.elements[{i}]"
        level = _need(rec, "level", int, ew)
        try:
            elems.append(GradedElement(poly_from_json(rec, nvars, True, ew), level))
        except ValueError as err:
            raise SchemaError(f"{ew}: {err}") from None
    deg_psi = doc.get("deg_psi")
    if deg_psi is not None and (not isinstance(deg_psi, int) or deg_psi < 1):
        raise SchemaError(f"{where}.deg_psi: must be a positive integer")
    return elems, order, deg_psi


# files -------------------------------------------------------------------------------

def read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise SchemaError(f"{path}: invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from None


def write_json(path: str, doc: dict) -> None:
    """Write atomically: a temp file in the target directory, then rename."""
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _with_path(path: str, fn):
    doc = read_json(path)
    try:
        return fn(doc, where=os.path.basename(path))
    except SchemaError:
        raise
    except (ValueError, TypeError) as err:
        raise SchemaError(f"{path}: {err}") from None


def parse_system(path: str) -> PolySystem:
    return _with_path(path, system_from_json)


def parse_candidates(path: str) -> List[Candidate]:
    return _with_path(path, candidates_from_json)


def parse_basis(path: str):
    return _with_path(path, basis_from_json)
