"""Region predicates and a small boolean algebra over them.

Closed-form predicates act on Q-points of the HL families.  Named atoms
(``PPT``, ``MUB``, ``Choi(a=1/3)``, ``CCNR``...) are evaluated on a
:class:`StateBatch` and combined with ``&``, ``|`` and ``~`` (``and``/``or``/
``not`` and the logic symbols are accepted too).
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import witnesses as wt
from .linalg import DEFAULT_TOL, min_eigenvalues, nuclear_norm, partial_transpose, realign
from .simplex import _coords, ccnr_norm, hl_density, hl_weights, pt_min_eigenvalue, weights_to_density

REGION_TOL = 1e-12


def density_region(d: int, Q, tol: float = REGION_TOL):
    """Membership in the HL density polytope (closed, with slack ``tol``)."""
    Q = _coords(d, Q)
    if d == 3:
        total = Q[..., 0] + 3.0 * Q[..., 1] + 2.0 * Q[..., 2]
    else:
        total = Q[..., 0] + 4.0 * (Q[..., 1] + Q[..., 2]) + 3.0 * Q[..., 3]
    out = np.all(Q >= -tol, axis=-1) & (total <= 1.0 + tol)
    return bool(out) if out.ndim == 0 else out


def ppt_terms_hl3(q1, q2, q3) -> tuple:
    """Polynomials that are all <= 0 exactly on the d=3 PPT region.

    Plain arithmetic only, so symbolic arguments work as well as arrays.
    """
    return (
        -q1,
        -q3,
        q1 + 3 * q2 + 2 * q3 - 1,
        q1 * q1 + 3 * q2 * q1 + (3 * q2 + q3) ** 2 - 3 * q2 - 2 * q1 * q3,
    )


def ppt_region(d: int, Q, tol: float = REGION_TOL):
    """Closed-form positive-partial-transpose condition on the HL families."""
    Q = _coords(d, Q)
    if d == 3:
        out = np.logical_and.reduce([t <= tol for t in ppt_terms_hl3(*np.moveaxis(Q, -1, 0))])
    else:
        q1, q2, q3, q4 = np.moveaxis(Q, -1, 0)
        out = (
            (q3 >= -tol)
            & (q1 + 3.0 * q4 >= -tol)
            & (q1 + 4.0 * (q2 + q3) + 3.0 * q4 <= 1.0 + tol)
            & (
                q1 * q1 + 4.0 * q2 * q1 + q4 * q4 + 16.0 * q2 * (q2 + q3) + 12.0 * q2 * q4
                - 4.0 * q2 - 2.0 * q1 * q4
                <= tol
            )
            & ((q1 - q4) ** 2 - 16.0 * q3 * q3 <= tol)
        )
    return bool(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# state batches

FAMILIES = {
    "hl3": (3, "hl"),
    "hl4": (4, "hl"),
    "full3": (3, "full"),
    "full4": (4, "full"),
    "horodecki": (3, "hl"),
}


class StateBatch:
    """A batch of magic-simplex states plus lazily computed spectral data.

    ``Q`` is given for HL-type families (``hl3``, ``hl4``, ``horodecki``);
    ``c`` (shape ``(n, d, d)``) for the full simplices.  With ``dense=True``
    the partial-transpose spectrum and realignment norm are computed from the
    explicit density matrices instead of the Bell-diagonal shortcuts.
    """

    def __init__(self, family: str, *, Q=None, c=None, lam=None, dense: bool = False):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
        self.family = family
        self.d, self.kind = FAMILIES[family]
        self.dense = dense
        self.lam = None if lam is None else np.atleast_1d(np.asarray(lam, dtype=float))
        if self.kind == "hl":
            if Q is None:
                raise ValueError(f"family {family} needs Q-points")
            self.Q = np.atleast_2d(_coords(self.d, Q))
            self._c = None
        else:
            if c is None:
                raise ValueError(f"family {family} needs simplex weights")
            c = np.asarray(c, dtype=float)
            if c.ndim == 2:
                c = c[None]
            if c.shape[-2:] != (self.d, self.d):
                raise ValueError(f"weights of shape {c.shape} do not match d={self.d}")
            self.Q = None
            self._c = c

    def __len__(self) -> int:
        return len(self.Q) if self.Q is not None else len(self._c)

    @property
    def c(self) -> np.ndarray:
        if self._c is None:
            self._c = hl_weights(self.d, self.Q)
        return self._c

    def density(self) -> np.ndarray:
        return weights_to_density(self.c)

    @cached_property
    def pt_min_eig(self) -> np.ndarray:
        if self.dense:
            d = self.d
            return min_eigenvalues(partial_transpose(self.density(), (d, d)))
        return pt_min_eigenvalue(self.c)

    @cached_property
    def ccnr_norm(self) -> np.ndarray:
        if self.dense:
            d = self.d
            return nuclear_norm(realign(self.density(), (d, d)))
        return ccnr_norm(self.c)


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Atom:
    name: str
    dims: tuple[int, ...]
    kinds: tuple[str, ...]
    params: tuple[str, ...]
    defaults: tuple
    slow: Callable[[str], bool] | bool
    fn: Callable
    doc: str = ""

    def is_slow(self, kind: str) -> bool:
        return self.slow(kind) if callable(self.slow) else self.slow

    def supports(self, family: str) -> bool:
        d, kind = FAMILIES[family]
        return d in self.dims and kind in self.kinds


def _witness_flags(w: wt.WitnessSpec, b: StateBatch) -> np.ndarray:
    if b.kind == "hl" and w.q_form is not None:
        return w.q_form.flags(b.Q)
    return w.flags_c(b.c)


def _density(b: StateBatch) -> np.ndarray:
    if b.kind == "hl":
        return density_region(b.d, b.Q)
    c = b.c
    return np.all(c >= -REGION_TOL, axis=(-2, -1)) & (np.abs(c.sum(axis=(-2, -1)) - 1.0) <= 1e-10)


def _ppt(b: StateBatch) -> np.ndarray:
    if b.kind == "hl":
        return ppt_region(b.d, b.Q)
    return b.pt_min_eig >= -DEFAULT_TOL


def _mub(b: StateBatch) -> np.ndarray:
    if b.kind == "hl":
        return wt.mub_predicate_hl3(b.Q)
    return wt.mub_I4_full(b.c) > 2.0 + wt.FLAG_TOL


def _choi_form(b: StateBatch, t: float) -> np.ndarray:
    # 1 + 2 Q3 - 2 Q1 - 3 Q2, i.e. 6 Tr[W rho] for the a=1 Choi witness
    w = wt.choi_witness(1.0)
    if b.kind == "hl":
        q1, q2, q3 = np.moveaxis(b.Q, -1, 0)
        val = 1.0 + 2.0 * q3 - 2.0 * q1 - 3.0 * q2
    else:
        val = 6.0 * np.einsum("...kl,kl->...", b.c, w.bell_weights)
    return val < t


def _jba(idx: int, d: int):
    make = wt.jba3_witnesses if d == 3 else wt.jba4_witnesses

    def fn(b: StateBatch, alpha: float) -> np.ndarray:
        return make(alpha)[idx].q_form.flags(b.Q)

    return fn


def _always_slow(kind: str) -> bool:
    return True


ATOMS: dict[str, Atom] = {}


def _register(atom: Atom) -> None:
    ATOMS[atom.name] = atom


_BOTH = ("hl", "full")
_register(Atom("DENSITY", (3, 4), _BOTH, (), (), False, _density, "valid density matrix"))
_register(Atom("PPT", (3, 4), _BOTH, (), (), lambda k: k == "full", _ppt, "positive partial transpose"))
_register(
    Atom("PPTspec", (3, 4), _BOTH, (), (), _always_slow, lambda b: b.pt_min_eig >= -DEFAULT_TOL,
         "spectral PPT check")
)
_register(Atom("MUB", (3,), _BOTH, (), (), False, _mub, "MUB criterion flags entanglement"))
_register(
    Atom("Choi", (3,), _BOTH, ("a",), (1.0,), False,
         lambda b, a: _witness_flags(wt.choi_witness(a), b), "generalized Choi witness flags")
)
_register(Atom("ChoiForm", (3,), _BOTH, ("t",), (0.0,), False, _choi_form, "Choi trace form below t"))
_register(Atom("JBA", (3,), ("hl",), ("alpha",), (0.5,), False, _jba(0, 3), "first JBA witness"))
_register(Atom("JBA2", (3,), ("hl",), ("alpha",), (0.5,), False, _jba(1, 3), "second JBA witness"))
_register(Atom("JBA4", (4,), ("hl",), ("alpha",), (0.3,), False, _jba(0, 4), "first ququart JBA witness"))
_register(Atom("JBA4p", (4,), ("hl",), ("alpha",), (0.3,), False, _jba(1, 4), "second ququart JBA witness"))
_register(
    Atom("Chrusc1", (4,), _BOTH, (), (), False, lambda b: _witness_flags(wt.chrusc_witness(1), b),
         "Chruscinski ququart witness")
)
_register(
    Atom("Chrusc2", (4,), _BOTH, (), (), False, lambda b: _witness_flags(wt.chrusc_witness(2), b),
         "modified Chruscinski witness")
)
_register(
    Atom("W", (4,), _BOTH, ("a", "b", "c", "d"), (1.0, 1.0, 1.0, 0.0), False,
         lambda b, **p: _witness_flags(wt.wabcd_witness(p["a"], p["b"], p["c"], p["d"]), b),
         "circulant W[a,b,c,d] witness")
)
_register(
    Atom("Class1", (4,), _BOTH, ("a",), (1.0,), False,
         lambda b, a: _witness_flags(wt.wabcd_class1(a), b), "W[a,b,c,d] class I")
)
_register(
    Atom("Class2", (4,), _BOTH, ("a",), (1.0,), False,
         lambda b, a: _witness_flags(wt.wabcd_class2(a), b), "W[a,b,c,d] class II")
)
_register(
    Atom("Torus", (3,), _BOTH, (), (), False, lambda b: _witness_flags(wt.mub_torus_instance(), b),
         "printed MUB-torus witness")
)
_register(
    Atom("CCNR", (3, 4), _BOTH, (), (), _always_slow, lambda b: b.ccnr_norm > 1.0 + DEFAULT_TOL,
         "realignment criterion flags entanglement")
)


# ---------------------------------------------------------------------------
# expressions


class RegionExpr:
    def atoms(self) -> list["Ref"]:
        raise NotImplementedError

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Ref(RegionExpr):
    name: str
    params: tuple[tuple[str, float], ...] = ()

    @property
    def atom(self) -> Atom:
        return ATOMS[self.name]

    def atoms(self):
        return [self]

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}(" + ", ".join(f"{k}={v!r}" for k, v in self.params) + ")"


@dataclass(frozen=True)
class Not(RegionExpr):
    arg: RegionExpr

    def atoms(self):
        return self.arg.atoms()

    def __str__(self) -> str:
        return f"~{self.arg}"


@dataclass(frozen=True)
class And(RegionExpr):
    left: RegionExpr
    right: RegionExpr

    def atoms(self):
        return self.left.atoms() + self.right.atoms()

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(RegionExpr):
    left: RegionExpr
    right: RegionExpr

    def atoms(self):
        return self.left.atoms() + self.right.atoms()

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


class ExprError(ValueError):
    pass


_NUM_OPS = {
    ast.Add: lambda x, y: x + y,
    ast.Sub: lambda x, y: x - y,
    ast.Mult: lambda x, y: x * y,
    ast.Div: lambda x, y: x / y,
    ast.Pow: lambda x, y: x**y,
}
_NUM_FUNCS = {"sqrt": math.sqrt}


def _number(node) -> float:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _number(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _NUM_OPS:
        return _NUM_OPS[type(node.op)](_number(node.left), _number(node.right))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _NUM_FUNCS:
        if len(node.args) != 1 or node.keywords:
            raise ExprError(f"{node.func.id} takes one argument")
        return _NUM_FUNCS[node.func.id](_number(node.args[0]))
    raise ExprError(f"expected a numeric parameter, got {ast.dump(node)}")


def _ref(name: str, args, keywords) -> Ref:
    if name not in ATOMS:
        raise ExprError(f"unknown region {name!r}; known: {', '.join(sorted(ATOMS))}")
    atom = ATOMS[name]
    if len(args) > len(atom.params):
        raise ExprError(f"{name} takes at most {len(atom.params)} parameters")
    values = dict(zip(atom.params, atom.defaults))
    for pname, node in zip(atom.params, args):
        values[pname] = _number(node)
    for kw in keywords:
        if kw.arg not in atom.params:
            raise ExprError(f"{name} has no parameter {kw.arg!r}")
        values[kw.arg] = _number(kw.value)
    return Ref(name, tuple((p, values[p]) for p in atom.params))


def _build(node) -> RegionExpr:
    if isinstance(node, ast.Expression):
        return _build(node.body)
    if isinstance(node, ast.Name):
        return _ref(node.id, [], [])
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        return _ref(node.func.id, node.args, node.keywords)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.Invert, ast.Not)):
        return Not(_build(node.operand))
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.BitAnd, ast.BitOr)):
        cls = And if isinstance(node.op, ast.BitAnd) else Or
        return cls(_build(node.left), _build(node.right))
    if isinstance(node, ast.BoolOp):
        cls = And if isinstance(node.op, ast.And) else Or
        parts = [_build(v) for v in node.values]
        out = parts[0]
        for p in parts[1:]:
            out = cls(out, p)
        return out
    raise ExprError(f"unsupported syntax in region expression: {ast.dump(node)}")


def parse_expr(text: str | RegionExpr) -> RegionExpr:
    """Parse ``"PPT & ~MUB"``, ``"PPT and (MUB or Choi(a=1/3))"``, ``"PPT∧¬MUB"``..."""
    if isinstance(text, RegionExpr):
        return text
    src = text.replace("∧", "&").replace("∨", "|").replace("¬", "~")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"cannot parse region expression {text!r}: {exc.msg}") from None
    return _build(tree)


def check_family(expr: RegionExpr, family: str) -> None:
    for ref in expr.atoms():
        if not ref.atom.supports(family):
            raise ExprError(f"region {ref.name} is not defined for family {family}")


def is_slow(expr: RegionExpr, family: str) -> bool:
    kind = FAMILIES[family][1]
    return any(ref.atom.is_slow(kind) for ref in expr.atoms())


def _eval(expr: RegionExpr, batch: StateBatch, cache: dict) -> np.ndarray:
    if isinstance(expr, Ref):
        if expr not in cache:
            cache[expr] = np.asarray(expr.atom.fn(batch, **dict(expr.params)), dtype=bool)
        return cache[expr]
    if isinstance(expr, Not):
        return ~_eval(expr.arg, batch, cache)
    if isinstance(expr, And):
        return _eval(expr.left, batch, cache) & _eval(expr.right, batch, cache)
    if isinstance(expr, Or):
        return _eval(expr.left, batch, cache) | _eval(expr.right, batch, cache)
    raise TypeError(f"not a region expression: {expr!r}")


def evaluate(exprs, batch: StateBatch) -> list[np.ndarray]:
    """Evaluate several expressions on one batch, sharing atom results."""
    parsed = [parse_expr(e) for e in exprs]
    for e in parsed:
        check_family(e, batch.family)
    cache: dict = {}
    return [_eval(e, batch, cache) for e in parsed]


def eval_expr(expr, Q, d: int | None = None):
    """Evaluate one expression at HL Q-points (``d`` inferred from the last axis)."""
    Q = np.asarray(Q, dtype=float)
    d = d if d is not None else (3 if Q.shape[-1] == 3 else 4)
    batch = StateBatch(f"hl{d}", Q=Q)
    out = evaluate([expr], batch)[0]
    return bool(out[0]) if Q.ndim == 1 else out


# ---------------------------------------------------------------------------
# the d=3 probability table

TABLE1_VERSION = "1"

# (label, expression, formula id)
TABLE1 = (
    ("PPT", "PPT", "d3.ppt"),
    ("MUB", "MUB", "d3.mub"),
    ("Choi", "Choi", "d3.choi"),
    ("PPT∧MUB", "PPT & MUB", "d3.ppt_mub"),
    ("PPT∧Choi", "PPT & Choi", "d3.ppt_choi"),
    ("MUB∧Choi", "MUB & Choi", "d3.mub_and_choi"),
    ("MUB∨Choi", "MUB | Choi", "d3.mub_or_choi"),
    ("¬MUB∧Choi", "~MUB & Choi", "d3.notmub_choi"),
    ("MUB∧¬Choi", "MUB & ~Choi", "d3.mub_notchoi"),
    ("PPT∧¬MUB", "PPT & ~MUB", "d3.ppt_notmub"),
    ("PPT∧¬Choi", "PPT & ~Choi", "d3.ppt_notchoi"),
    ("PPT∧MUB∧Choi", "PPT & MUB & Choi", "d3.ppt_mub_choi"),
    ("PPT∧(MUB∨Choi)", "PPT & (MUB | Choi)", "d3.ppt_and_mub_or_choi"),
    ("¬PPT∧MUB", "~PPT & MUB", "d3.notppt_mub"),
    ("¬PPT∧Choi", "~PPT & Choi", "d3.notppt_choi"),
    ("¬PPT∧¬MUB", "~PPT & ~MUB", "d3.notppt_notmub"),
    ("¬PPT∧¬Choi", "~PPT & ~Choi", "d3.notppt_notchoi"),
    ("¬PPT∧¬MUB∧¬Choi", "~PPT & ~MUB & ~Choi", "d3.notppt_notmub_notchoi"),
    ("PPT∧¬MUB∧¬Choi", "PPT & ~MUB & ~Choi", "d3.ppt_notmub_notchoi"),
    ("PPT∨(MUB∧Choi)", "PPT | (MUB & Choi)", "d3.ppt_or_mub_and_choi"),
)


def table1_json(indent: int | None = 2) -> str:
    rows = [{"label": lab, "expr": str(parse_expr(e)), "formula": fid} for lab, e, fid in TABLE1]
    return json.dumps({"version": TABLE1_VERSION, "rows": rows}, indent=indent, ensure_ascii=False)
