"""Closed-form Hilbert-Schmidt probabilities, transcribed once and evaluated in double precision.

Each :class:`FormulaEntry` carries its domain, the reference decimals it is quoted
with, and flags:

``catalog_only``
    no sampler in this package can cross-check it (the underlying state family
    is not modelled).
``numeric_only``
    the reference value is a numerical estimate, not a closed form.
``provisional``
    quoted with an explicit caveat.
``corrected``
    the reference expression has an evident typo; the corrected form is stored
    and the printed one is kept in ``note``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from scipy import integrate, optimize

from .witnesses import ExtrapolationWarning

SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)
SQRT17 = math.sqrt(17.0)
PI = math.pi
LN2 = math.log(2.0)
LN3 = math.log(3.0)


class DomainError(ValueError):
    """Parameter outside the formula's domain, or at a singular point."""


def acsch(x: float) -> float:
    return math.asinh(1.0 / x)


def asech(x: float) -> float:
    return math.acosh(1.0 / x)


@dataclass(frozen=True)
class FormulaEntry:
    id: str
    fn: Callable
    anchor: str
    param: str | None = None
    domain: tuple[float, float] | None = None
    printed: tuple[str, ...] = ()
    flags: frozenset = field(default_factory=frozenset)
    note: str = ""

    @property
    def arity(self) -> int:
        return 0 if self.param is None else 1

    def in_domain(self, x: float) -> bool:
        lo, hi = self.domain
        return lo - 1e-15 <= x <= hi + 1e-15


CATALOG: dict[str, FormulaEntry] = {}


def _add(id, fn, anchor, param=None, domain=None, printed=(), flags=(), note=""):
    if id in CATALOG:
        raise KeyError(f"duplicate formula id {id}")
    if isinstance(printed, str):
        printed = (printed,)
    CATALOG[id] = FormulaEntry(id, fn, anchor, param, domain, tuple(printed), frozenset(flags), note)


def _const(v: float) -> Callable[[], float]:
    return lambda: v


# ---------------------------------------------------------------------------
# d = 3, MUB / Choi table

_PPT3 = 8 * PI / (27 * SQRT3)
_BOUND3 = -4 / 9 + 4 * PI / (27 * SQRT3) + LN3 / 6
_PPT_NOT = (72 + 8 * SQRT3 * PI - 27 * LN3) / 162
_NOTPPT_W = 1 / 3 + 22518 * SQRT3 / 91 + 3888 * SQRT3 / (7 * PI) - 10939 * PI / (27 * SQRT3) - LN3 / 8
_NOTPPT_NOT = (9 * (7 + math.log(27.0)) - 8 * SQRT3 * PI) / 162

_add("d3.ppt", _const(_PPT3), "d=3 HL family: PPT", printed=("0.537422",))
_add("d3.mub", _const(1 / 6), "d=3 HL family: MUB criterion", printed=("0.1666667", "0.16667"))
_add("d3.choi", _const(1 / 6), "d=3 HL family: Choi witness", printed=("0.1666667", "0.16667"))
_add("d3.ppt_mub", _const(_BOUND3), "d=3 HL family: PPT and MUB", printed=("0.00736862",))
_add("d3.ppt_choi", _const(_BOUND3), "d=3 HL family: PPT and Choi", printed=("0.00736862",))
_add("d3.mub_and_choi", _const(1 / 9), "d=3 HL family: MUB and Choi", printed=("0.11111",))
_add("d3.mub_or_choi", _const(2 / 9), "d=3 HL family: MUB or Choi", printed=("0.22222",))
_add("d3.notmub_choi", _const(1 / 18), "d=3 HL family: Choi without MUB", printed=("0.05555",))
_add("d3.mub_notchoi", _const(1 / 18), "d=3 HL family: MUB without Choi", printed=("0.05555",))
_add("d3.ppt_notmub", _const(_PPT_NOT), "d=3 HL family: PPT, not MUB", printed=("0.5300534",))
_add("d3.ppt_notchoi", _const(_PPT_NOT), "d=3 HL family: PPT, not Choi", printed=("0.5300534",))
_add("d3.ppt_mub_choi", _const(0.0), "d=3 HL family: PPT, MUB and Choi", printed=("0",))
_add(
    "d3.ppt_and_mub_or_choi",
    _const(-8 / 9 + 8 * PI / (27 * SQRT3) + LN3 / 3),
    "d=3 HL family: PPT and (MUB or Choi)",
    printed=("0.0147372",),
)
_add("d3.notppt_mub", _const(_NOTPPT_W), "d=3 HL family: MUB, not PPT", printed=("0.1592980",))
_add("d3.notppt_choi", _const(_NOTPPT_W), "d=3 HL family: Choi, not PPT", printed=("0.1592980",))
_add("d3.notppt_notmub", _const(_NOTPPT_NOT), "d=3 HL family: neither PPT nor MUB", printed=("0.303279920",))
_add("d3.notppt_notchoi", _const(_NOTPPT_NOT), "d=3 HL family: neither PPT nor Choi", printed=("0.303279920",))
_add(
    "d3.notppt_notmub_notchoi",
    _const((3 * LN3 - 1) / 9),
    "d=3 HL family: none of PPT, MUB, Choi",
    printed=("0.255092985",),
)
_add(
    "d3.ppt_notmub_notchoi",
    _const((8 - 3 * LN3) / 9),
    "d=3 HL family: PPT, neither witness",
    printed=("0.5226847927",),
)
_add(
    "d3.ppt_or_mub_and_choi",
    _const((9 + 8 * SQRT3 * PI) / 81),
    "d=3 HL family: PPT or (MUB and Choi)",
    printed=("0.648533145",),
)

# ---------------------------------------------------------------------------
# d = 3, generalized Choi family


def choi_ent(a: float) -> float:
    return -((a - 2) ** 3) / (9 * a * a - 30 * a + 27)


def choi_bound(a: float) -> float:
    A = 8 * math.sqrt(12 - 9 * a) * (6 * a * a - 17 * a + 12) * math.acos((a * (3 * a - 8) + 6) / (6 - 4 * a))
    B = 3 * math.sqrt(a) * (2 * (9 * a**3 - 57 * a * a + 108 * a - 64) + 3 * (3 - 2 * a) * a * math.log(9 - 6 * a))
    return -(A + B) / (54 * (4 - 3 * a) ** 1.5 * (2 * a - 3))


def choi_ratio(a: float) -> float:
    return choi_bound(a) / choi_ent(a)


_GOLDEN_A = (3 - SQRT5) / 4

_add("d3.choi.ent", choi_ent, "generalized Choi family: entanglement", "a", (0.0, 1.0))
_add("d3.choi.bound", choi_bound, "generalized Choi family: bound entanglement", "a", (0.0, 1.0))
_add("d3.choi.ratio", choi_ratio, "generalized Choi family: bound / entangled", "a", (0.0, 1.0))
_add(
    "d3.choi.bound.third",
    _const((-204 + 7 * math.log(7.0) + 168 * SQRT3 * math.acos(11 / 14)) / 1134),
    "generalized Choi family: bound entanglement at a=1/3",
    printed=("0.00325612294236", "0.00325613"),
)
_add("d3.choi.ent.third", _const(125 / 486), "generalized Choi family: entanglement at a=1/3", printed=("0.257202",))
_add(
    "d3.choi.ent.golden",
    _const(5 / 132 * (5 + SQRT5)),
    "generalized Choi family: entanglement at a=(3-sqrt5)/4",
    printed=("0.274093",),
)
_add(
    "d3.choi.bound.golden",
    lambda: choi_bound(_GOLDEN_A),
    "generalized Choi family: bound entanglement at a=(3-sqrt5)/4",
    printed=("0.00149772192",),
    flags=("numeric_only",),
)

# ---------------------------------------------------------------------------
# d = 3, JBA family


def jba3_ent(alpha: float) -> float:
    return (1 - 3 * alpha) / (2 - 12 * alpha)


def jba3_bound(alpha: float) -> float:
    # the square roots go imaginary for alpha above ~0.42; the combination stays real
    a = complex(alpha)
    g = 6 * (1 - 3 * a) * a + 1
    z = (3 * a + 1) / cmath.sqrt(g)
    br = (
        8 * SQRT3 * PI * g * g
        - 18 * (3 * a - 1) * (15 * a + 2) * (6 * a * (3 * a - 1) - 1)
        - 6 * cmath.sqrt(18 * (1 - 3 * a) * a + 3) * (3 * a + 1) ** 3 * cmath.asin(1 / z)
    )
    v = br / (162 * g * g)
    if abs(v.imag) > 1e-9 * max(1.0, abs(v.real)):
        raise DomainError(f"d3.jba.bound is not real at alpha={alpha}")
    return v.real


_add("d3.jba.ent", jba3_ent, "JBA qutrit witnesses: entanglement", "alpha", (1 / 3, 2 / 3))
_add("d3.jba.bound", jba3_bound, "JBA qutrit witnesses: bound entanglement", "alpha", (1 / 3, 2 / 3))
_add(
    "d3.jba.bound.half",
    _const((-342 + 16 * SQRT3 * PI + 375 * math.sqrt(6.0) * acsch(5 / math.sqrt(2.0))) / 324),
    "JBA qutrit witnesses: bound entanglement at alpha=1/2",
    printed=("0.00470668",),
)
_add(
    "d3.jba.bound.twothirds",
    _const((8 * SQRT3 * PI + 9 * (math.log(27.0) - 8)) / 162),
    "JBA qutrit witnesses: bound entanglement at alpha=2/3",
    printed=("0.00736862",),
)
_add(
    "d3.jba.limit",
    _const((-90 + 16 * SQRT3 * PI + 3 * math.sqrt(6.0) * math.asinh(math.sqrt(2.0))) / 324),
    "JBA qutrit witnesses: alpha -> infinity limit of the bound formula",
    printed=("0.0169299",),
)

_add(
    "d3.ccnr.ent",
    _const(0.445977184637177),
    "d=3 HL family: realignment entanglement (numerical)",
    printed=("0.445977184637177",),
    flags=("numeric_only",),
)
_add(
    "d3.ccnr.bound",
    _const(0.0189035154692955),
    "d=3 HL family: realignment bound entanglement (numerical)",
    printed=("0.0189035154692955",),
    flags=("numeric_only",),
)

# ---------------------------------------------------------------------------
# d = 4

_CHRUSC1_BOUND = 8 * LN2 / 27 - 59 / 288
_CHRUSC2_BOUND = 24 * acsch(8 / SQRT17) / (17 * SQRT17) - 91 / 544

_add("d4.ppt", _const(0.5 + math.log(2 - SQRT3) / (8 * SQRT3)), "d=4 HL family: PPT", printed=("0.404957",))
_add("d4.chrusc1.ent", _const(2 / 9), "Chruscinski witness: entanglement", printed=())
_add("d4.chrusc2.ent", _const(1 / 8), "modified Chruscinski witness: entanglement", printed=())
_add(
    "d4.chrusc1.bound",
    _const(_CHRUSC1_BOUND),
    "Chruscinski witness: bound entanglement",
    printed=("0.00051583",),
)
_add(
    "d4.chrusc2.bound",
    _const(_CHRUSC2_BOUND),
    "modified Chruscinski witness: bound entanglement",
    printed=("0.002187", "0.00218722"),
)
_add(
    "d4.chrusc.joint",
    _const(-571 / 2448 + 5 * LN2 / 54 + 24 * acsch(8 / SQRT17) / (17 * SQRT17)),
    "both Chruscinski witnesses: bound entanglement",
    printed=("0.000395295",),
)


def wabcd_c1_ent(a: float) -> float:
    return (a - 3) ** 4 / (2 * (a - 7) * (2 * a - 5) * (-2 * a + math.sqrt(-4 * (a - 2) * a - 3) + 7))


def wabcd_c2_ent(a: float) -> float:
    return -((a - 3) ** 4) * (a + math.sqrt((1 - a) * a) - 4) / (8 * (a - 7) * (a - 2) * (a * (2 * a - 9) + 16))


_WABCD_NOTE = "printed values are inconsistent with the printed W[a,b,c,d] matrix; not sampled"
_add(
    "d4.wabcd.c1.ent",
    wabcd_c1_ent,
    "W[a,b,c,d] class I: entanglement",
    "a",
    (0.5, 1.5),
    flags=("catalog_only",),
    note=_WABCD_NOTE,
)
_add(
    "d4.wabcd.c2.ent",
    wabcd_c2_ent,
    "W[a,b,c,d] class II: entanglement",
    "a",
    (0.0, 1.0),
    flags=("catalog_only",),
    note=_WABCD_NOTE,
)
for _id, _v, _lab, _pr in (
    ("d4.wabcd.c1.half", 625 / 4992, "class I at a=1/2", ("0.1252",)),
    ("d4.wabcd.c1.one", 2 / 27, "class I at a=1", ("0.0740741",)),
    ("d4.wabcd.c2.zero", 81 / 448, "class II at a=0", ("0.180804",)),
    ("d4.wabcd.c2.one", 1 / 9, "class II at a=1", ("0.11111",)),
    ("d4.wabcd.and.half", 512 / 4125, "classes I and II at a=1/2", ("0.124121212",)),
    ("d4.wabcd.or.half", 512 / 3135, "classes I or II at a=1/2", ("0.163317384",)),
    ("d4.wabcd.and.one", 2 / 16335, "classes I and II at a=1", ("0.000122436",)),
    ("d4.wabcd.or.one", 32 / 165, "classes I or II at a=1", ("0.193939",)),
):
    _add(_id, _const(_v), f"W[a,b,c,d] {_lab}: entanglement", printed=_pr, flags=("catalog_only",), note=_WABCD_NOTE)
_add(
    "d4.wabcd.c2.min",
    _const(0.1062629),
    "W[a,b,c,d] class II: minimum of the entanglement curve",
    printed=("0.1062629",),
    flags=("numeric_only", "catalog_only"),
)


def jba4_ent(alpha: float) -> float:
    return (1 - 4 * alpha) / (2 - 16 * alpha)


def jba4_union(alpha: float) -> float:
    return (2 - 8 * alpha) / (3 - 24 * alpha)


def jba4_intersection(alpha: float) -> float:
    return (4 * alpha - 1) / (3 * (8 * alpha - 1))


def jba4_bound(alpha: float) -> float:
    a = alpha
    if a <= 0.25:
        raise DomainError("d4.jba.bound needs alpha > 1/4")
    A = (-2 * a - 1) * (32 * a + 1) * (16 * (1 - 5 * a) * a + 1) ** 2 * math.sqrt(6 / (4 * a - 1) + 5)
    B = 27 * a * (8 * a + 1) ** 3 * (16 * a * (10 * a + 1) + 1) * math.acosh(12 * a / (8 * a + 1))
    C = -3 * (8 * a + 1) ** 4 * (2 * a * (80 * a + 23) + 1) * asech(math.sqrt((16 * a + 2) / (20 * a + 1)))
    return (A + B + C) / (32 * (4 * a - 1) ** 2.5 * (20 * a + 1) ** 3.5)


_add("d4.jba.ent", jba4_ent, "JBA ququart witnesses: entanglement", "alpha", (0.25, 1 / 3))
_add("d4.jba.union", jba4_union, "JBA ququart witnesses: either flags", "alpha", (0.25, 1 / 3))
_add(
    "d4.jba.intersection",
    jba4_intersection,
    "JBA ququart witnesses: both flag",
    "alpha",
    (0.25, 1 / 3),
    flags=("corrected",),
    note="printed as (1-4a)/(3(8a-1)), which is negative on the domain",
)
_add("d4.jba.bound", jba4_bound, "JBA ququart witnesses: bound entanglement", "alpha", (0.25, 1 / 3))
_add(
    "d4.jba.bound.third",
    _const(
        (
            -92575
            + 7798329 * math.acosh(12 / 11) / math.sqrt(23.0)
            - 13484361 * math.acosh(math.sqrt(23 / 22)) / math.sqrt(23.0)
        )
        / 389344
    ),
    "JBA ququart witnesses: bound entanglement at alpha=1/3",
    printed=("0.00162026",),
)
_add(
    "d4.jba.limit",
    _const(-(5 * SQRT5 + math.log(8.0) - 27 * math.log(3 + SQRT5) + 24 * (LN2 + acsch(2.0))) / (200 * SQRT5)),
    "JBA ququart witnesses: alpha -> infinity limit of the bound formula",
    printed=("0.00728067",),
)
_add(
    "d4.ccnr.ent",
    _const(1 / 32),
    "d=4 HL family: realignment entanglement",
    printed=("1/32",),
    flags=("provisional",),
)
_add(
    "d4.ccnr.bound",
    _const(0.01265489845176),
    "d=4 HL family: realignment bound entanglement (numerical)",
    printed=("0.01265489845176",),
    flags=("provisional", "numeric_only"),
)
_add("d4.w4.ent", _const(8 / 25), "W4 ququart witness: entanglement", printed=("0.32",), flags=("catalog_only",))

# ---------------------------------------------------------------------------
# full simplices, Horodecki line

_add(
    "full8.ppt.conj",
    _const(7 * PI / (25 * SQRT5)),
    "full qutrit magic simplex: PPT (conjectured)",
    printed=("0.3933896249", "0.39338962"),
)
_add(
    "full8.mub_ppt",
    _const(0.00011335),
    "full qutrit magic simplex: PPT and I4 > 2 (numerical)",
    printed=("0.00011335",),
    flags=("numeric_only",),
)
_add(
    "full15.ppt.conj",
    _const(1 / 8 + math.log(3 - SQRT5) / (13 * SQRT5)),
    "full ququart magic simplex: PPT (conjectured)",
    printed=("0.115737",),
)
_add(
    "full15.ccnr.ent",
    _const(0.5539652981),
    "full ququart magic simplex: realignment entanglement (numerical)",
    printed=("0.5539652981",),
    flags=("numeric_only",),
)
_add(
    "full15.ccnr.bound.conj",
    _const(1 / 750),
    "full ququart magic simplex: PPT and realignment (conjectured)",
    printed=("0.00133333",),
)
_add(
    "full15.ccnr.bound.est",
    _const(0.001334655094),
    "full ququart magic simplex: PPT and realignment (numerical)",
    printed=("0.001334655094",),
    flags=("numeric_only",),
)
_add("horodecki.ppt", _const(3 / 5), "Horodecki line, lambda uniform on [0,5]: PPT")
_add("horodecki.bound", _const(1 / 5), "Horodecki line: PPT and MUB")

# ---------------------------------------------------------------------------
# generalized Horodecki and Horodecki-Werner states (not modelled here)

_GH = ("catalog_only",)
_ERRATUM = "printed decimal disagrees with the printed closed form"
_add(
    "gh3.ppt",
    _const((4 * SQRT3 * PI - 9) / 27),
    "generalized Horodecki qutrits: PPT",
    printed=("0.4278",),
    flags=_GH + ("erratum",),
    note=_ERRATUM,
)
_add("gh3.ent", _const(0.5), "generalized Horodecki qutrits: entanglement", flags=_GH)
_add(
    "gh3.bound",
    _const((2 * SQRT3 * PI - 9) / 27),
    "generalized Horodecki qutrits: bound entanglement",
    printed=("0.0697322",),
    flags=_GH + ("erratum",),
    note=_ERRATUM,
)
_add("gh4.ppt", _const(1 / 3), "generalized Horodecki ququarts: PPT", printed=("0.3333",), flags=_GH)
_add("gh4.ent", _const(0.5), "generalized Horodecki ququarts: entanglement", flags=_GH)
_add("gh4.bound", _const(1 / 24), "generalized Horodecki ququarts: bound entanglement", printed=("0.0416667",), flags=_GH)
_add(
    "gh5.ppt",
    _const(0.33734924124312192527),
    "generalized Horodecki ququints: PPT (numerical)",
    printed=("0.33734924124312192527",),
    flags=_GH + ("numeric_only",),
)
_add("gh5.ent", _const(0.5), "generalized Horodecki ququints: entanglement", flags=_GH)
_add(
    "gh5.bound",
    _const(0.0370662),
    "generalized Horodecki ququints: bound entanglement (numerical)",
    printed=("0.0370662",),
    flags=_GH + ("numeric_only",),
)

_add(
    "hw3.ppt",
    _const((-66 + 21 * SQRT17 + 50 * SQRT3 * math.asin(math.sqrt(1.5 * (417 - 7 * SQRT17)) / 50)) / 81),
    "Horodecki-Werner qutrits: PPT",
    printed=("0.792568",),
    flags=_GH,
)
_add("hw4.ppt", _const(437 / 192 - 7 * math.sqrt(7.0) / 12), "Horodecki-Werner ququarts: PPT", printed=("0.732687",), flags=_GH)
_add(
    "hw5.ppt",
    _const(0.758301),
    "Horodecki-Werner ququints: PPT (numerical)",
    printed=("0.758301",),
    flags=_GH + ("numeric_only",),
)
_add(
    "hw5.bound.sixth",
    _const(6561 / 781250),
    "Horodecki-Werner ququints: bound entanglement at alpha=1/6",
    printed=("0.00839808",),
    flags=_GH,
)
_add(
    "hw5.bound.jump",
    _const(
        0.0119320240085435
        + 8 / 625
        + (2008781 - 157760 * math.sqrt(145.0)) / 1953125
        + 72 * (696 * math.sqrt(145.0) - 7925) / 390625
    ),
    "Horodecki-Werner ququints: bound entanglement just past alpha=1/7",
    printed=("0.1646314041874492",),
    flags=_GH,
)

# The piecewise entanglement curves leave the interval between the two inner
# roots unassigned; every adjacent piece vanishes there, so the gap is 0.


def hw3_ent(alpha: float) -> float:
    a = alpha
    den = 162 * (1 - 3 * a) ** 2
    if 15 * a > 7 or a < 0:
        return (7 - 15 * a) ** 2 / den
    if a <= 1 / 6:
        return (3 * a * (411 * a - 254) + 113) / den
    if a < 11 / 39:
        return (11 - 39 * a) ** 2 / den
    return 0.0


def hw3_bound(alpha: float) -> float:
    a = alpha
    den = 162 * (1 - 3 * a) ** 2
    if a <= 1 / 6:
        return (3 * a * (411 * a - 254) + 113) / den
    return (11 - 39 * a) ** 2 / den


def hw4_ent(alpha: float) -> float:
    a = alpha
    den = 8192 * (4 * a - 1) ** 3
    if a > 13 / 40 or a < 0:
        return (40 * a - 13) ** 3 / den
    if a < 1 / 8:
        return (460288 * a**3 - 330816 * a * a + 78024 * a - 5995) / den
    if a < 19 / 88:
        return (88 * a - 19) ** 3 / den
    return 0.0


def hw4_bound(alpha: float) -> float:
    a = alpha
    return (8 * a * (8 * a * (14600 * a - 9537) + 16599) - 9623) / (12288 * (4 * a - 1) ** 3)


def hw5_ent(alpha: float) -> float:
    a = alpha
    den = 781250 * (5 * a - 1) ** 4
    if a > 21 / 85 or a < 0:
        return (85 * a - 21) ** 4 / den
    if a <= 1 / 10:
        return (436080625 * a**4 - 339038500 * a**3 + 98070150 * a * a - 12476260 * a + 586769) / den
    if a < 29 / 165:
        return (165 * a - 29) ** 4 / den
    return 0.0


HW3_BREAKS = (0.0, 1 / 6, 11 / 39, 7 / 15)
HW4_BREAKS = (0.0, 1 / 8, 19 / 88, 13 / 40)
HW5_BREAKS = (0.0, 1 / 10, 29 / 165, 21 / 85)

_add("hw3.ent", hw3_ent, "Horodecki-Werner qutrits: JBA entanglement", "alpha", (-1.0, 2.0), flags=_GH)
_add(
    "hw3.bound",
    hw3_bound,
    "Horodecki-Werner qutrits: JBA bound entanglement",
    "alpha",
    ((71 - 6 * SQRT17) / 309, 11 / 39),
    flags=_GH,
)
_add("hw4.ent", hw4_ent, "Horodecki-Werner ququarts: JBA entanglement", "alpha", (-1.0, 2.0), flags=_GH)
_add(
    "hw4.bound",
    hw4_bound,
    "Horodecki-Werner ququarts: JBA bound entanglement",
    "alpha",
    ((161 - 18 * math.sqrt(7.0)) / 872, 11 / 56),
    flags=_GH,
)
_add("hw5.ent", hw5_ent, "Horodecki-Werner ququints: JBA entanglement", "alpha", (-1.0, 2.0), flags=_GH)


# ---------------------------------------------------------------------------


def get(id: str) -> FormulaEntry:
    try:
        return CATALOG[id]
    except KeyError:
        raise KeyError(f"unknown formula {id!r}") from None


def eval_formula(id: str, x: float | None = None, *, extrapolate: bool = False) -> float:
    """Evaluate a catalog entry.

    Unary entries outside their domain raise :class:`DomainError` unless
    ``extrapolate`` is set, in which case an :class:`ExtrapolationWarning`
    is issued.
    """
    e = get(id)
    if e.arity == 0:
        if x is not None:
            raise TypeError(f"{id} takes no parameter")
        return float(e.fn())
    if x is None:
        raise TypeError(f"{id} needs the parameter {e.param}")
    x = float(x)
    if not e.in_domain(x):
        if not extrapolate:
            raise DomainError(f"{id}: {e.param}={x} outside {e.domain}")
        warnings.warn(f"{id}: {e.param}={x} outside {e.domain}", ExtrapolationWarning, stacklevel=2)
    try:
        v = e.fn(x)
    except (ZeroDivisionError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"{id} is singular or undefined at {e.param}={x}: {exc}") from None
    if not math.isfinite(v):
        raise DomainError(f"{id} is not finite at {e.param}={x}")
    return float(v)


def parse_printed(text: str) -> tuple[float, float]:
    """Value and half-width of agreement for a printed number (one unit in the last place)."""
    if "/" in text:
        return float(Fraction(text)), 1e-15
    if "." in text:
        k = len(text.split(".")[1])
        return float(text), 10.0**-k
    return float(text), 1.0 if text != "0" else 0.0


def printed_match(value: float, text: str) -> bool:
    target, width = parse_printed(text)
    if width == 0.0:
        return value == target
    return abs(value - target) < width


def quad_bound_choi(a: float, epsabs: float = 1e-11, epsrel: float = 1e-10) -> float:
    """Bound-entangled volume for the Choi family by nested quadrature (times 36).

    Integrates the Q2 extent between the PPT boundary and the witness plane,
    then over Q3 and Q1, using closed-form integration limits.
    """
    if not 0.0 < a <= 1.0:
        raise DomainError(f"quad_bound_choi needs a in (0, 1], got {a}")

    def length(q3, q1):
        base = (1 - q1 - 2 * q3) / 6
        lo = base - math.sqrt(max(-3 * q1 * q1 + 12 * q3 * q1 - 2 * q1 - 4 * q3 + 1, 0.0)) / 6
        hi = base - math.sqrt(max(-(((a - 2) * (3 * q1 - 1) + 6 * a * q3) ** 2) / (a * (3 * a - 4)), 0.0)) / 6
        return max(hi - lo, 0.0)

    def q3_hi(q1):
        r = (3 * a - 4) * (3 * q1 - 1) * (3 * (3 * a - 4) * q1 + 4) / (a * a)
        return max((a * (math.sqrt(max(r, 0.0)) + 3) + (15 - 9 * a) * q1 - 5) / (9 * a), 0.0)

    q1_lo = (-a * a + 2 * a - 1) / (2 * a - 3)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            v, _ = integrate.dblquad(length, q1_lo, 1 / 3, 0.0, q3_hi, epsabs=epsabs, epsrel=epsrel)
        except integrate.IntegrationWarning as exc:
            raise RuntimeError(f"quadrature did not converge at a={a}: {exc}") from None
    return 36.0 * v


def _argmax(fn, lo, hi):
    res = optimize.minimize_scalar(lambda x: -fn(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return res.x, -res.fun


def _crossing(fn, lo, hi):
    return optimize.brentq(fn, lo, hi, xtol=1e-14)


@dataclass(frozen=True)
class Identity:
    name: str
    value: float
    target: float
    tol: float

    @property
    def ok(self) -> bool:
        return abs(self.value - self.target) <= self.tol


def _quiet(ev, id, x):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExtrapolationWarning)
        return ev(id, x, extrapolate=True)


def formula_identities() -> list[Identity]:
    """Cross-checks between catalog entries and reference side values."""
    ev = eval_formula
    out = [
        Identity("d3.choi.bound(1) = d3.ppt_mub", ev("d3.choi.bound", 1.0), ev("d3.ppt_mub"), 1e-12),
        Identity("d3.jba.bound(2/3) = d3.ppt_mub", ev("d3.jba.bound", 2 / 3), ev("d3.ppt_mub"), 1e-12),
        Identity("d3.jba.bound(2/3) = closed form", ev("d3.jba.bound", 2 / 3), ev("d3.jba.bound.twothirds"), 1e-12),
        Identity("d3.jba.bound(1/2) = closed form", ev("d3.jba.bound", 0.5), ev("d3.jba.bound.half"), 1e-12),
        Identity("d3.choi.bound(1/3) = closed form", ev("d3.choi.bound", 1 / 3), ev("d3.choi.bound.third"), 1e-12),
        Identity("d3.choi.ent(1/3) = 125/486", ev("d3.choi.ent", 1 / 3), 125 / 486, 1e-12),
        Identity("d3.choi.ent(0) = 8/27", ev("d3.choi.ent", 0.0), 8 / 27, 1e-12),
        Identity("d3.choi.ent(golden) = closed form", ev("d3.choi.ent", _GOLDEN_A), ev("d3.choi.ent.golden"), 1e-12),
        Identity("d4.jba.bound(3/8) = d4.chrusc2.bound", _quiet(ev, "d4.jba.bound", 3 / 8), ev("d4.chrusc2.bound"), 1e-12),
        Identity("d4.jba.bound(1/3) = closed form", ev("d4.jba.bound", 1 / 3), ev("d4.jba.bound.third"), 1e-12),
        Identity("d4.chrusc2.bound / d4.chrusc1.bound", ev("d4.chrusc2.bound") / ev("d4.chrusc1.bound"), 4.24019, 1e-4),
        Identity("d4.wabcd.c1.ent(1/2) = 625/4992", ev("d4.wabcd.c1.ent", 0.5), 625 / 4992, 1e-12),
        Identity("d4.wabcd.c2.ent(1/2) = 625/4992", ev("d4.wabcd.c2.ent", 0.5), 625 / 4992, 1e-12),
        Identity("d4.wabcd.c1.ent(1) = 2/27", ev("d4.wabcd.c1.ent", 1.0), 2 / 27, 1e-12),
        Identity("d4.wabcd.c2.ent(1) = 1/9", ev("d4.wabcd.c2.ent", 1.0), 1 / 9, 1e-12),
        Identity("d4.wabcd.c2.ent(0) = 81/448", ev("d4.wabcd.c2.ent", 0.0), 81 / 448, 1e-12),
        Identity("hw4.ent continuous at 19/88", hw4_ent(19 / 88 - 1e-13), hw4_ent(19 / 88), 1e-12),
        Identity("hw4.ent continuous at 1/8", hw4_ent(1 / 8 - 1e-13), hw4_ent(1 / 8 + 1e-13), 1e-9),
    ]
    x, peak = _argmax(choi_bound, 0.5, 1.0)
    out.append(Identity("argmax d3.choi.bound", x, 0.8509958, 1e-5))
    out.append(Identity("max d3.choi.bound", peak, 0.0082382, 1e-6))
    x, peak = _argmax(choi_ratio, 0.5, 1.0)
    out.append(Identity("argmax d3.choi.ratio", x, 0.94280530186, 1e-5))
    out.append(Identity("max d3.choi.ratio", peak, 0.0450501588, 1e-8))
    x, low = _argmax(lambda a: -wabcd_c2_ent(a), 0.5, 1.0)
    out.append(Identity("argmin d4.wabcd.c2.ent", x, 0.9347153, 1e-5))
    out.append(Identity("min d4.wabcd.c2.ent", -low, 0.1062629, 1e-7))
    # JBA curve rescaled by alpha = (a + 1) / 3 crosses the Choi curve once
    cross = _crossing(lambda a: jba3_bound((a + 1) / 3) - choi_bound(a), 0.2, 0.6)
    out.append(Identity("Choi/JBA crossing a", cross, 0.372519577, 1e-8))
    out.append(Identity("Choi/JBA crossing value", choi_bound(cross), 0.00377346692, 1e-10))
    return out


def plot_data(id: str, lo: float | None = None, hi: float | None = None, n: int = 101, *, extrapolate: bool = False):
    """``(x, value)`` pairs on a uniform grid over the domain of a unary entry."""
    e = get(id)
    if e.arity != 1:
        raise ValueError(f"{id} has no parameter to scan")
    if n < 2:
        raise ValueError("need at least two grid points")
    lo = e.domain[0] if lo is None else lo
    hi = e.domain[1] if hi is None else hi
    if not lo < hi:
        raise ValueError("empty grid")
    out = []
    for i in range(n):
        x = lo + (hi - lo) * i / (n - 1)
        try:
            y = eval_formula(id, x, extrapolate=extrapolate)
        except DomainError:
            y = math.nan
        out.append((x, y))
    return out


def catalog_listing() -> list[dict]:
    rows = []
    for e in CATALOG.values():
        row = {
            "id": e.id,
            "arity": e.arity,
            "param": e.param,
            "domain": list(e.domain) if e.domain else None,
            "anchor": e.anchor,
            "printed": list(e.printed),
            "flags": sorted(e.flags),
        }
        if e.note:
            row["note"] = e.note
        if e.arity == 0:
            row["value"] = eval_formula(e.id)
        else:
            lo, hi = e.domain
            pts = {}
            for x in (lo, (lo + hi) / 2, hi):
                try:
                    pts[repr(x)] = eval_formula(e.id, x)
                except DomainError:
                    pts[repr(x)] = None
            row["values"] = pts
        rows.append(row)
    return rows
