"""Entanglement witnesses for the magic-simplex families.

A witness is carried as a :class:`WitnessSpec` holding an optional matrix and
an optional affine Q-space form.  Entanglement is flagged when the form (or
``Tr[W rho]``) is negative.  Every form used here is affine in Q, so when a witness
carries both representations their proportionality is checked exactly at the
vertices of the density polytope when the witness is built.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import DEFAULT_TOL, nuclear_norm, realign, trace_pair
from .simplex import bell_basis, hl_density, hl_vertices

FLAG_TOL = 1e-12

JBA3_RANGE = (1.0 / 3.0, 2.0 / 3.0)
JBA4_RANGE = (0.25, 1.0 / 3.0)

_NAMES = ("Q1", "Q2", "Q3", "Q4")


class ExtrapolationWarning(UserWarning):
    """A witness or formula was evaluated outside its stated parameter range."""


@dataclass(frozen=True)
class AffineForm:
    """``const + coeffs . Q``; entanglement is flagged where it is negative."""

    const: float
    coeffs: tuple[float, ...]

    def __call__(self, Q) -> np.ndarray:
        Q = np.asarray(Q, dtype=float)
        return self.const + Q @ np.asarray(self.coeffs)

    def flags(self, Q, tol: float = FLAG_TOL) -> np.ndarray:
        return self(Q) < -tol

    def __str__(self) -> str:
        terms = []
        for coef, name in zip(self.coeffs, _NAMES):
            if coef != 0.0:
                terms.append(f"{coef:+.12g}*{name}")
        if self.const != 0.0 or not terms:
            terms.append(f"{self.const:+.12g}")
        return " ".join(terms) + " < 0"


@dataclass(frozen=True, eq=False)
class WitnessSpec:
    id: str
    d: int
    params: dict = field(default_factory=dict)
    matrix: np.ndarray | None = None
    q_form: AffineForm | None = None
    extrapolated: bool = False

    def __post_init__(self):
        if self.matrix is not None:
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (self.d**2, self.d**2):
                raise ValueError(f"{self.id}: matrix shape {m.shape} does not match d={self.d}")
            if np.max(np.abs(m - m.conj().T)) > 1e-12:
                raise ValueError(f"{self.id}: witness matrix is not Hermitian")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        if self.q_form is not None and len(self.q_form.coeffs) != (3 if self.d == 3 else 4):
            raise ValueError(f"{self.id}: q_form has the wrong number of coordinates")
        if self.matrix is not None and self.q_form is not None:
            _ = self.kappa

    @cached_property
    def kappa(self) -> float | None:
        """Constant with ``Tr[W rho(Q)] = kappa * q_form(Q)``."""
        if self.matrix is None or self.q_form is None:
            return None
        verts = hl_vertices(self.d)
        tr = np.array([self.trace(hl_density(self.d, v)) for v in verts])
        form = self.q_form(verts)
        kappa = float(np.dot(tr, form) / np.dot(form, form))
        if kappa <= 0.0 or np.max(np.abs(tr - kappa * form)) > 1e-10:
            raise ValueError(f"{self.id}: matrix trace is not a positive multiple of its Q-form")
        return kappa

    @cached_property
    def bell_weights(self) -> np.ndarray:
        """``Tr[W P[k,l]]`` grid; ``Tr[W rho] = sum c * bell_weights`` for Bell-diagonal rho."""
        if self.matrix is None:
            raise ValueError(f"{self.id}: no matrix representation")
        P = bell_basis(self.d)
        w = np.einsum("ij,klji->kl", self.matrix, P)
        w = w.real.copy()
        w.setflags(write=False)
        return w

    def trace(self, rho) -> float:
        if self.matrix is None:
            raise ValueError(f"{self.id}: no matrix representation")
        return trace_pair(self.matrix, rho).real

    def flags_Q(self, Q, tol: float = FLAG_TOL) -> np.ndarray:
        if self.q_form is not None:
            return self.q_form.flags(Q, tol)
        from .simplex import hl_weights

        return self.flags_c(hl_weights(self.d, Q), tol)

    def flags_c(self, c, tol: float = FLAG_TOL) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        return np.einsum("...kl,kl->...", c, self.bell_weights) < -tol

    def to_dict(self) -> dict:
        out = {"id": self.id, "d": self.d, "params": dict(self.params), "extrapolated": self.extrapolated}
        if self.matrix is not None:
            out["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        if self.q_form is not None:
            out["q_form"] = str(self.q_form)
            out["kappa"] = self.kappa
        return out


# ---------------------------------------------------------------------------
# d = 3


def mub_predicate_hl3(Q, tol: float = FLAG_TOL):
    """MUB criterion on the d=3 family: ``Q1 > 3 Q2 + 4 Q3``."""
    Q = np.asarray(Q, dtype=float)
    if Q.shape[-1] != 3:
        raise ValueError("MUB predicate is defined on d=3 Q-points")
    return MUB.q_form.flags(Q, tol)


def mub_I4_full(c) -> np.ndarray | float:
    """``I4`` correlation sum on the full d=3 magic simplex; flags when ``I4 > 2``."""
    c = np.asarray(c, dtype=float)
    if c.shape[-2:] != (3, 3):
        raise ValueError("I4 is defined on d=3 weights")
    i4 = (
        3 * c[..., 0, 0]
        + c[..., 0, 1]
        + 2 * c[..., 0, 2]
        + c[..., 1, 1]
        + 2 * c[..., 1, 2]
        + c[..., 2, 1]
        + 2 * c[..., 2, 2]
    )
    return float(i4) if np.ndim(i4) == 0 else i4


MUB = WitnessSpec("mub", 3, q_form=AffineForm(0.0, (-1.0, 3.0, 4.0)))


def choi_params(a: float) -> tuple[float, float, float]:
    """``(a, b, c)`` with ``b + c = 2 - a``, ``b c = (1 - a)**2`` and ``b <= c``.

    At ``a = 1`` this gives ``(1, 0, 1)``, the original Choi witness.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    s = 2.0 - a
    disc = s * s - 4.0 * (1.0 - a) ** 2
    if disc < 0.0:
        raise ValueError("complex roots")
    r = math.sqrt(disc)
    return a, (s - r) / 2.0, (s + r) / 2.0


def choi_abc_from_i(i: int) -> tuple[float, float, float]:
    if i not in range(6):
        raise ValueError(f"i must be one of 0..5, got {i}")
    t = math.pi * i / 3.0
    a = 2.0 / 3.0 * (math.cos(t) + 1.0)
    b = 2.0 / 3.0 * (-0.5 * math.sqrt(3.0) * math.sin(t) - 0.5 * math.cos(t) + 1.0)
    c = 2.0 / 3.0 * (0.5 * math.sqrt(3.0) * math.sin(t) - 0.5 * math.cos(t) + 1.0)
    return a, b, c


def _circulant_witness(d: int, diag_of_shift, corner: float) -> np.ndarray:
    # diagonal entry at |i, j> depends on (j - i) mod d; -1 couples |ii> and |jj>
    n = d * d
    m = np.zeros((n, n))
    for i in range(d):
        for j in range(d):
            m[i * d + j, i * d + j] = diag_of_shift[(j - i) % d]
    for i in range(d):
        for j in range(d):
            if i != j:
                m[i * d + i, j * d + j] = corner
    return m


def choi_witness(a: float = 1.0, b: float | None = None, c: float | None = None) -> WitnessSpec:
    """Generalized Choi witness with diagonal ``{a,b,c, c,a,b, b,c,a} / 6``."""
    if b is None or c is None:
        a, b, c = choi_params(a)
    m = _circulant_witness(3, (a, b, c), -1.0) / 6.0
    form = AffineForm(c, (a - 2.0 - c, 3.0 * (b - c), 2.0 * (a + 1.0 - c)))
    return WitnessSpec("choi", 3, {"a": a, "b": b, "c": c}, matrix=m, q_form=form)


def _range_flag(alpha: float, rng: tuple[float, float], name: str) -> bool:
    lo, hi = rng
    outside = not (lo - 1e-15 <= alpha <= hi + 1e-15)
    if outside:
        warnings.warn(
            f"{name}: alpha={alpha} outside [{lo:.6g}, {hi:.6g}]; treated as extrapolated",
            ExtrapolationWarning,
            stacklevel=3,
        )
    return outside


def jba3_witnesses(alpha: float) -> tuple[WitnessSpec, WitnessSpec]:
    """The two d=3 Jafarizadeh-Behzadi-Akbari witnesses as Q-space forms."""
    ext = _range_flag(alpha, JBA3_RANGE, "jba3")
    a = alpha
    w1 = AffineForm(0.0, (a * (1.0 - 3.0 * a), a * (9.0 * a - 3.0), 6.0 * a * a))
    g = a * (3.0 * a - 1.0)
    w2 = AffineForm(g, (-2.0 * g, -3.0 * g, 2.0 * a))
    return (
        WitnessSpec("jba3", 3, {"alpha": a}, q_form=w1, extrapolated=ext),
        WitnessSpec("jba3p", 3, {"alpha": a}, q_form=w2, extrapolated=ext),
    )


def jba3_predicates(alpha: float, Q):
    Q = np.asarray(Q, dtype=float)
    if Q.shape[-1] != 3:
        raise ValueError("JBA d=3 predicates need d=3 Q-points")
    w1, w2 = jba3_witnesses(alpha)
    return w1.q_form.flags(Q), w2.q_form.flags(Q)


def mub_torus_instance() -> WitnessSpec:
    """The printed MUB-derived witness (phases pi, pi, 0, 0), prefactor 1/3."""
    m = np.array(
        [
            [4, 0, 0, 0, -1, 0, 0, 0, -1],
            [0, 1, 0, 0, 0, 2, 2, 0, 0],
            [0, 0, 1, 2, 0, 0, 0, 2, 0],
            [0, 0, 2, 1, 0, 0, 0, 2, 0],
            [-1, 0, 0, 0, 4, 0, 0, 0, -1],
            [0, 2, 0, 0, 0, 1, 2, 0, 0],
            [0, 2, 0, 0, 0, 2, 1, 0, 0],
            [0, 0, 2, 2, 0, 0, 0, 1, 0],
            [-1, 0, 0, 0, -1, 0, 0, 0, 4],
        ],
        dtype=float,
    )
    return WitnessSpec("mub_torus", 3, {"phi": (math.pi, math.pi, 0.0, 0.0)}, matrix=m / 3.0)


# ---------------------------------------------------------------------------
# d = 4


def wabcd_witness(a: float, b: float, c: float, d: float, *, check: bool = True) -> WitnessSpec:
    """Circulant ququart witness ``W[a,b,c,d]`` with ``a+b+c+d = 3``.

    The Q-form is the trace against the d=4 HL state, i.e.
    ``(a-3) Q1 + 4 b Q2 + 4 c Q3 + 3 (a+1) Q4 + 4 d Q0`` with
    ``Q0 = (1 - Q1 - 4 Q2 - 4 Q3 - 3 Q4) / 4``.
    """
    if check:
        if min(a, b, c, d) < -1e-10 or abs(a + b + c + d - 3.0) > 1e-10:
            raise ValueError(f"W[a,b,c,d] needs nonnegative parameters summing to 3, got {(a, b, c, d)}")
    m = _circulant_witness(4, (a, b, c, d), -1.0)
    form = AffineForm(d, (a - 3.0 - d, 4.0 * (b - d), 4.0 * (c - d), 3.0 * (a + 1.0 - d)))
    return WitnessSpec("wabcd", 4, {"a": a, "b": b, "c": c, "d": d}, matrix=m, q_form=form)


def wabcd_class1(a: float) -> WitnessSpec:
    """Class I: ``a + c = 2``, ``b + d = 1``, ``b d = (1 - a)**2`` (``b`` the larger root)."""
    disc = 1.0 - 4.0 * (1.0 - a) ** 2
    if disc < -1e-12:
        raise ValueError(f"class I needs a in [1/2, 3/2], got {a}")
    r = math.sqrt(max(disc, 0.0))
    w = wabcd_witness(a, (1.0 + r) / 2.0, 2.0 - a, (1.0 - r) / 2.0)
    return WitnessSpec("wabcd.class1", 4, w.params, matrix=w.matrix, q_form=w.q_form)


def wabcd_class2(a: float) -> WitnessSpec:
    """Class II: ``a + c = 1``, ``b + d = 2``, ``a c = (1 - b)**2`` (``b <= 1``)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"class II needs a in [0, 1], got {a}")
    b = 1.0 - math.sqrt(a * (1.0 - a))
    w = wabcd_witness(a, b, 1.0 - a, 2.0 - b)
    return WitnessSpec("wabcd.class2", 4, w.params, matrix=w.matrix, q_form=w.q_form)


def chrusc_witness(variant: int = 1) -> WitnessSpec:
    """Chruscinski's ququart witness (variant 1) and its diagonal modification (variant 2)."""
    if variant == 1:
        params, form = (1.0, 1.0, 1.0, 0.0), AffineForm(0.0, (-1.0, 2.0, 2.0, 3.0))
    elif variant == 2:
        params, form = (2.0, 1.0, 0.0, 0.0), AffineForm(0.0, (-1.0, 4.0, 0.0, 9.0))
    else:
        raise ValueError(f"unknown Chruscinski variant {variant!r}")
    m = _circulant_witness(4, params, -1.0)
    return WitnessSpec(f"chrusc{variant}", 4, {"variant": variant}, matrix=m, q_form=form)


def jba4_witnesses(alpha: float) -> tuple[WitnessSpec, WitnessSpec]:
    ext = _range_flag(alpha, JBA4_RANGE, "jba4")
    a = alpha
    s = (4.0 * a - 1.0) / (4.0 * a)
    w1 = AffineForm(0.0, (-s, 4.0 * s, 0.0, 3.0))
    g = a * (4.0 * a - 1.0)
    w2 = AffineForm(g, (-2.0 * g, -4.0 * g, -4.0 * g, 3.0 * a))
    return (
        WitnessSpec("jba4", 4, {"alpha": a}, q_form=w1, extrapolated=ext),
        WitnessSpec("jba4p", 4, {"alpha": a}, q_form=w2, extrapolated=ext),
    )


def jba4_predicates(alpha: float, Q):
    Q = np.asarray(Q, dtype=float)
    if Q.shape[-1] != 4:
        raise ValueError("JBA d=4 predicates need d=4 Q-points")
    w1, w2 = jba4_witnesses(alpha)
    return w1.q_form.flags(Q), w2.q_form.flags(Q)


# ---------------------------------------------------------------------------


def witness_min_over_vertices(w: WitnessSpec, d: int | None = None) -> float:
    """Minimum of ``Tr[W rho(Q)]`` over the HL density polytope.

    The trace is affine in Q, so the minimum sits at a vertex.
    """
    d = w.d if d is None else d
    if w.matrix is None:
        raise ValueError(f"{w.id}: only witnesses with a matrix can be minimized over the polytope")
    if d != w.d:
        raise ValueError(f"{w.id} acts on d={w.d}, not d={d}")
    return min(w.trace(hl_density(d, v)) for v in hl_vertices(d))


def ccnr_flag(rho, dims, tol: float = DEFAULT_TOL) -> bool:
    """Realignment criterion: entangled if the realigned trace norm exceeds 1."""
    rho = np.asarray(rho)
    if abs(np.trace(rho).real - 1.0) > 1e-8 or np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise ValueError("ccnr_flag expects a unit-trace Hermitian state")
    return bool(nuclear_norm(realign(rho, dims)) > 1.0 + tol)


def catalog() -> list[WitnessSpec]:
    out = [MUB, choi_witness(1.0), mub_torus_instance(), chrusc_witness(1), chrusc_witness(2)]
    out += [choi_witness(a) for a in (0.0, 1.0 / 3.0, 0.5)]
    out += list(jba3_witnesses(0.5))
    out += list(jba4_witnesses(0.3))
    out += [wabcd_class1(1.0), wabcd_class2(1.0)]
    return out


def catalog_json(indent: int | None = 2) -> str:
    return json.dumps([w.to_dict() for w in catalog()], indent=indent)
