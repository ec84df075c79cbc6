"""Map a (family, region expression) pair to the closed-form value it should estimate."""

from __future__ import annotations

from .formulas import eval_formula, get
from .regions import TABLE1, And, Or, Ref, RegionExpr, parse_expr


def _conjuncts(e: RegionExpr):
    if isinstance(e, Ref):
        return [e]
    if isinstance(e, And):
        left, right = _conjuncts(e.left), _conjuncts(e.right)
        if left is not None and right is not None:
            return left + right
    return None


def _sig(refs) -> tuple:
    return tuple(sorted(r.name for r in refs))


_TABLE = {str(parse_expr(e)): fid for _, e, fid in TABLE1}

# family -> signature of a pure conjunction -> formula id
_PLAIN = {
    "hl3": {
        ("CCNR",): "d3.ccnr.ent",
        ("CCNR", "PPT"): "d3.ccnr.bound",
    },
    "hl4": {
        ("PPT",): "d4.ppt",
        ("Chrusc1",): "d4.chrusc1.ent",
        ("Chrusc2",): "d4.chrusc2.ent",
        ("Chrusc1", "PPT"): "d4.chrusc1.bound",
        ("Chrusc2", "PPT"): "d4.chrusc2.bound",
        ("Chrusc1", "Chrusc2", "PPT"): "d4.chrusc.joint",
        ("CCNR",): "d4.ccnr.ent",
        ("CCNR", "PPT"): "d4.ccnr.bound",
    },
    "full3": {
        ("PPT",): "full8.ppt.conj",
        ("MUB", "PPT"): "full8.mub_ppt",
    },
    "full4": {
        ("PPT",): "full15.ppt.conj",
        ("CCNR",): "full15.ccnr.ent",
        ("CCNR", "PPT"): "full15.ccnr.bound.conj",
    },
    "horodecki": {
        ("PPT",): "horodecki.ppt",
        ("MUB", "PPT"): "horodecki.bound",
    },
}

# family -> signature -> (formula id, atom carrying the parameter, parameter name)
_PARAM = {
    "hl3": {
        ("Choi",): ("d3.choi.ent", "Choi", "a"),
        ("Choi", "PPT"): ("d3.choi.bound", "Choi", "a"),
        ("JBA",): ("d3.jba.ent", "JBA", "alpha"),
        ("JBA2",): ("d3.jba.ent", "JBA2", "alpha"),
        ("JBA", "PPT"): ("d3.jba.bound", "JBA", "alpha"),
        ("JBA2", "PPT"): ("d3.jba.bound", "JBA2", "alpha"),
    },
    "hl4": {
        ("JBA4",): ("d4.jba.ent", "JBA4", "alpha"),
        ("JBA4p",): ("d4.jba.ent", "JBA4p", "alpha"),
        ("JBA4", "JBA4p"): ("d4.jba.intersection", "JBA4", "alpha"),
        ("JBA4", "PPT"): ("d4.jba.bound", "JBA4", "alpha"),
        ("JBA4p", "PPT"): ("d4.jba.bound", "JBA4p", "alpha"),
    },
}


def target_for(family: str, expr) -> tuple[str, float | None] | None:
    """``(formula id, parameter)`` the region's probability should equal, if known."""
    expr = parse_expr(expr)
    key = str(expr)
    if family == "hl3" and key in _TABLE:
        return _TABLE[key], None
    if family == "hl4" and isinstance(expr, Or):
        parts = [_conjuncts(expr.left), _conjuncts(expr.right)]
        if all(p is not None and len(p) == 1 for p in parts):
            names = _sig(parts[0] + parts[1])
            if names == ("JBA4", "JBA4p"):
                a = dict(parts[0][0].params)["alpha"]
                if dict(parts[1][0].params)["alpha"] == a:
                    return "d4.jba.union", a
        return None
    refs = _conjuncts(expr)
    if refs is None:
        return None
    sig = _sig(refs)
    if sig in _PLAIN.get(family, {}):
        return _PLAIN[family][sig], None
    if sig in _PARAM.get(family, {}):
        fid, _, pname = _PARAM[family][sig]
        values = {dict(r.params).get(pname) for r in refs if pname in dict(r.params)}
        if len(values) != 1:
            return None
        return fid, values.pop()
    return None


def exact_for(family: str, expr) -> tuple[str, float] | None:
    """Closed-form value for a region, or None when no catalog entry applies."""
    t = target_for(family, expr)
    if t is None:
        return None
    fid, x = t
    e = get(fid)
    if e.param is None:
        return fid, eval_formula(fid)
    return f"{fid}({e.param}={x!r})", eval_formula(fid, x, extrapolate=True)
