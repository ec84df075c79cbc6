"""Reproduction checks at their pinned sample counts and tolerances.

Each ``crit<k>`` function returns a :class:`CriterionResult` made of named
checks.  ``run_all`` runs them in order; ``bound-atlas repro`` and the test
suite both print one line per criterion.  ``quick=True`` shrinks the sample
counts by 100x for smoke runs; those numbers are not the acceptance settings.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import formulas, regions, sampler, simplex, witnesses
from .formulas import eval_formula
from .linalg import min_eigenvalues, partial_transpose

BAND = 1e-8


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name: str, passed, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))


def _abs(res: CriterionResult, name: str, est: float, exact: float, tol: float) -> None:
    err = abs(est - exact)
    res.add(name, err < tol, f"est={est:.7g} exact={exact:.7g} |err|={err:.2e} tol={tol:g}")


def _rel(res: CriterionResult, name: str, est: float, exact: float, tol: float) -> None:
    err = abs(est - exact) / abs(exact)
    res.add(name, err < tol, f"est={est:.7g} exact={exact:.7g} rel={err:.3f} tol={tol:g}")


def _n(n: int, quick: bool) -> int:
    return max(n // 100, 1000) if quick else n


def _workers() -> int:
    return sampler.default_workers()


# ---------------------------------------------------------------------------


def crit1(quick: bool = False) -> CriterionResult:
    res = CriterionResult(1, "formula fidelity against printed decimals")
    t0 = time.perf_counter()
    bad = []
    checked = 0
    for e in formulas.CATALOG.values():
        if e.arity != 0 or not e.printed or "erratum" in e.flags:
            continue
        v = eval_formula(e.id)
        for text in e.printed:
            checked += 1
            if not formulas.printed_match(v, text):
                bad.append(f"{e.id}={v!r} vs {text}")
    elapsed = time.perf_counter() - t0
    res.add(f"{checked} printed values", not bad, "; ".join(bad))
    res.add("hw4.ppt = 437/192 - 7*sqrt(7)/12", abs(eval_formula("hw4.ppt") - (437 / 192 - 7 * math.sqrt(7) / 12)) < 1e-15)
    res.add("runtime < 1 s", elapsed < 1.0, f"{elapsed:.3f} s")
    return res


def crit2(quick: bool = False) -> CriterionResult:
    res = CriterionResult(2, "formula identities")
    for ident in formulas.formula_identities():
        res.add(ident.name, ident.ok, f"{ident.value!r} vs {ident.target!r} (tol {ident.tol:g})")
    return res


def crit3(quick: bool = False) -> CriterionResult:
    res = CriterionResult(3, "quadrature oracle for the Choi family")
    t0 = time.perf_counter()
    points = [1.0, 1 / 3, (3 - math.sqrt(5)) / 4] + list(np.linspace(0.05, 1.0, 20))
    worst = 0.0
    for a in points:
        worst = max(worst, abs(formulas.quad_bound_choi(a) - eval_formula("d3.choi.bound", a)))
    elapsed = time.perf_counter() - t0
    res.add("max |quad - closed form| < 1e-6 on 23 points", worst < 1e-6, f"{worst:.2e}")
    res.add("runtime < 60 s", elapsed < 60.0, f"{elapsed:.1f} s")
    return res


def crit4(quick: bool = False) -> CriterionResult:
    res = CriterionResult(4, "QMC vs exact, closed-form predicates")
    n = _n(10**7, quick)
    ev = eval_formula
    t3 = sampler.estimate(
        ["PPT", "MUB", "Choi", "MUB | Choi", "MUB & Choi", "PPT & MUB", "PPT & Choi", "PPT & MUB & Choi"],
        "hl3", n, slow=False, workers=_workers(),
    )
    _abs(res, "d3 PPT", t3["PPT"], ev("d3.ppt"), 2e-3)
    _abs(res, "d3 MUB", t3["MUB"], ev("d3.mub"), 2e-3)
    _abs(res, "d3 Choi", t3["Choi"], ev("d3.choi"), 2e-3)
    _abs(res, "d3 MUB|Choi", t3["MUB | Choi"], ev("d3.mub_or_choi"), 2e-3)
    _abs(res, "d3 MUB&Choi", t3["MUB & Choi"], ev("d3.mub_and_choi"), 2e-3)
    _rel(res, "d3 PPT&MUB", t3["PPT & MUB"], ev("d3.ppt_mub"), 0.05)
    _rel(res, "d3 PPT&Choi", t3["PPT & Choi"], ev("d3.ppt_choi"), 0.05)
    hits = t3.hit_count("PPT & MUB & Choi")
    res.add("d3 PPT&MUB&Choi has zero hits", hits == 0, f"{hits} hits")

    t4 = sampler.estimate(
        ["PPT", "Chrusc1", "Chrusc2", "PPT & Chrusc1", "PPT & Chrusc2"], "hl4", n, slow=False, workers=_workers()
    )
    _abs(res, "d4 PPT", t4["PPT"], ev("d4.ppt"), 2e-3)
    _abs(res, "d4 Chrusc1 ent", t4["Chrusc1"], ev("d4.chrusc1.ent"), 2e-3)
    _abs(res, "d4 Chrusc2 ent", t4["Chrusc2"], ev("d4.chrusc2.ent"), 2e-3)
    _rel(res, "d4 Chrusc2 bound", t4["PPT & Chrusc2"], ev("d4.chrusc2.bound"), 0.05)
    _rel(res, "d4 Chrusc1 bound", t4["PPT & Chrusc1"], ev("d4.chrusc1.bound"), 0.20)
    return res


def horodecki_ppt_interval():
    """Solve the d=3 PPT polynomial system on ``Q = (2/7, (5 - lam)/21, 0)`` symbolically."""
    import sympy as sp

    lam = sp.symbols("lam", real=True)
    Q = (sp.Rational(2, 7), (5 - lam) / 21, sp.Integer(0))
    sol = sp.Interval(0, 5)
    for term in regions.ppt_terms_hl3(*Q):
        sol = sol.intersect(sp.solve_univariate_inequality(sp.expand(term) <= 0, lam, relational=False))
    return sol


def crit5(quick: bool = False) -> CriterionResult:
    import sympy as sp

    res = CriterionResult(5, "Horodecki line")
    n = _n(10**6, quick)
    t = sampler.estimate(["PPT", "PPT & MUB"], "horodecki", n, slow=False)
    _abs(res, "PPT", t["PPT"], 0.6, 1e-3)
    _abs(res, "PPT & MUB", t["PPT & MUB"], 0.2, 1e-3)
    sol = horodecki_ppt_interval()
    res.add("PPT on Q(lam) reduces to 1 <= lam <= 4", sol == sp.Interval(1, 4), str(sol))
    lam = np.linspace(0, 5, 11)
    ref = np.stack([np.full_like(lam, 2 / 7), (5 - lam) / 21, np.zeros_like(lam)], axis=-1)
    err = float(np.max(np.abs(simplex.horodecki_Q(lam) - ref)))
    res.add("Q(lam) = (2/7, (5-lam)/21, 0)", err < 1e-15, f"{err:.1e}")
    return res


def _box_points(d: int, n: int) -> np.ndarray:
    # a box around the density polytope so both outcomes occur
    cfg = sampler.RobertsConfig(len(sampler._HL_SCALE[d]), 0.5)
    u = sampler.roberts_points(cfg, 0, n)
    scale = sampler._HL_SCALE[d]
    return (1.3 * u - 0.15) * scale


def oracle_disagreements(d: int, n: int) -> dict:
    """Closed-form density and PPT predicates vs dense spectral checks; counts outside the band."""
    out = {}
    Q = _box_points(d, n)
    c = simplex.hl_weights(d, Q)
    eig = np.concatenate([min_eigenvalues(simplex.weights_to_density(c[i:i + 20000])) for i in range(0, n, 20000)])
    keep = np.abs(eig) > BAND
    out["density"] = int(np.count_nonzero((regions.density_region(d, Q) != (eig > 0))[keep]))
    out["density_both"] = (int(np.count_nonzero(eig > 0)), int(np.count_nonzero(eig < 0)))

    cfg = sampler.RobertsConfig(len(sampler._HL_SCALE[d]), 0.5)
    Q = sampler.sample_hl_Q(d, cfg, 0, n)
    eig = np.concatenate([
        min_eigenvalues(partial_transpose(simplex.hl_density(d, Q[i:i + 20000]), (d, d)))
        for i in range(0, n, 20000)
    ])
    keep = np.abs(eig) > BAND
    out["ppt"] = int(np.count_nonzero((regions.ppt_region(d, Q) != (eig > 0))[keep]))
    out["ppt_both"] = (int(np.count_nonzero(eig > 0)), int(np.count_nonzero(eig < 0)))
    return out


def proportionality_defect(w: witnesses.WitnessSpec, n: int) -> float:
    """Max ``|Tr[W rho(Q)] - kappa * form(Q)|`` over ``n`` quasi-random HL states."""
    cfg = sampler.RobertsConfig(len(sampler._HL_SCALE[w.d]), 0.0)
    Q = sampler.sample_hl_Q(w.d, cfg, 0, n)
    tr = np.einsum("ij,nji->n", w.matrix, simplex.hl_density(w.d, Q)).real
    return float(np.max(np.abs(tr - w.kappa * w.q_form(Q))))


def crit6(quick: bool = False) -> CriterionResult:
    res = CriterionResult(6, "oracle equivalence of closed forms and spectra")
    n = _n(10**5, quick)
    for d in (3, 4):
        o = oracle_disagreements(d, n)
        res.add(f"d={d} density: zero disagreements", o["density"] == 0,
                f"{o['density']} off-band disagreements; (psd, not psd) = {o['density_both']}")
        res.add(f"d={d} PPT: zero disagreements", o["ppt"] == 0,
                f"{o['ppt']} off-band disagreements; (ppt, npt) = {o['ppt_both']}")
    for w in witnesses.catalog():
        if w.matrix is None or w.q_form is None:
            continue
        defect = proportionality_defect(w, 1000)
        res.add(f"{w.id}{w.params} trace proportional to Q-form", defect < 1e-10, f"{defect:.1e}")
    m = witnesses.witness_min_over_vertices(witnesses.mub_torus_instance())
    res.add("torus instance vertex minimum >= 0", m >= 0, f"{m!r}")
    return res


def crit7(quick: bool = False) -> CriterionResult:
    res = CriterionResult(7, "realignment (CCNR) on the HL families")
    n = _n(10**6, quick)
    t3 = sampler.estimate(["CCNR", "PPT & CCNR"], "hl3", n, workers=_workers())
    _abs(res, "d3 CCNR entanglement", t3["CCNR"], 0.4460, 5e-3)
    _rel(res, "d3 CCNR bound", t3["PPT & CCNR"], 0.0189, 0.15)
    t4 = sampler.estimate(["CCNR"], "hl4", n, workers=_workers())
    _rel(res, "d4 CCNR entanglement vs 1/32", t4["CCNR"], 1 / 32, 0.10)
    return res


def crit8(quick: bool = False) -> CriterionResult:
    res = CriterionResult(8, "full magic simplices")
    n = _n(10**6, quick)
    t = sampler.estimate(["PPT", "MUB & PPT"], "full3", n, workers=_workers())
    _abs(res, "full d=3 PPT", t["PPT"], 0.393390, 1.5e-3)
    v = t["MUB & PPT"]
    res.add("full d=3 MUB&PPT in [5e-5, 2e-4]", 5e-5 <= v <= 2e-4, f"est={v:.4g} ({t.hit_count('MUB & PPT')} hits)")

    regs = ["PPT", "CCNR", "PPT & CCNR"]
    head = sampler.estimate(regs, "full4", n, workers=_workers())
    _abs(res, "full d=4 PPT", head["PPT"], 0.115737, 2e-3)
    _abs(res, "full d=4 CCNR entanglement", head["CCNR"], 0.55397, 5e-3)
    n_ext = _n(10**7, quick)
    tail = sampler.estimate(regs, "full4", n_ext - n, n0=n, workers=_workers())
    full = head.merge(tail)
    _rel(res, f"full d=4 CCNR&PPT at N={full.total:.0e}", full["PPT & CCNR"], 0.0013346, 0.25)
    return res


def convergence_slope(alpha0: float = 0.5, quick: bool = False) -> tuple[float, list[tuple[int, float]]]:
    """Least-squares slope of log|err| vs log N for d3 PPT on a half-decade grid 1e4..1e7."""
    top = 5 if quick else 7
    grid = [round(10 ** (4 + k / 2)) for k in range(2 * (top - 4) + 1)]
    exact = eval_formula("d3.ppt")
    table, pts = None, []
    prev = 0
    for N in grid:
        part = sampler.estimate(["PPT"], "hl3", N - prev, alpha0=alpha0, n0=prev, slow=False)
        table = part if table is None else table.merge(part)
        prev = N
        pts.append((N, abs(table["PPT"] - exact)))
    x = np.log([p[0] for p in pts])
    y = np.log([max(p[1], 1e-300) for p in pts])
    return float(np.polyfit(x, y, 1)[0]), pts


def crit9(quick: bool = False) -> CriterionResult:
    res = CriterionResult(9, "sampler determinism, merging, convergence")
    n = _n(2 * 10**5, quick)
    regs = ["PPT", "MUB & PPT"]
    a = sampler.estimate(regs, "hl3", n, slow=False)
    b = sampler.estimate(regs, "hl3", n, slow=False)
    res.add("repeated runs give identical tables", a.to_json() == b.to_json())
    cfg = sampler.RobertsConfig(3, 0.5, 7)
    res.add("repeated point generation is bitwise equal",
            sampler.roberts_points(cfg, 0, 1000).tobytes() == sampler.roberts_points(cfg, 0, 1000).tobytes())
    k = n // 3
    merged = sampler.estimate(regs, "hl3", k, slow=False).merge(sampler.estimate(regs, "hl3", n - k, n0=k, slow=False))
    res.add("partition-merge equals a single run", merged.hits == a.hits and merged.total == a.total,
            f"{merged.hits} vs {a.hits}")
    small = sampler.estimate(regs, "hl3", n, slow=False, chunk=n // 7 + 1)
    res.add("chunking does not change counts", small.hits == a.hits)
    slope, pts = convergence_slope(0.5, quick)
    res.add("convergence faster than N^-0.7", slope <= -0.7,
            f"slope={slope:.3f}; " + ", ".join(f"N={N:.0e}:{e:.1e}" for N, e in pts))
    return res


def crit10(quick: bool = False) -> CriterionResult:
    res = CriterionResult(10, "JBA family-curve sampling")
    n = _n(10**7, quick)
    alphas = [0.5, 0.6, 2 / 3]
    regs = [f"PPT & JBA(alpha={a!r})" for a in alphas] + ["PPT & JBA(alpha=0.6) & JBA2(alpha=0.6)"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", witnesses.ExtrapolationWarning)
        t = sampler.estimate(regs, "hl3", n, slow=False, workers=_workers())
    for a, r in zip(alphas, regs):
        _rel(res, f"d3.jba.bound({a:.4g})", t[r], eval_formula("d3.jba.bound", a), 0.10)
    hits = t.hit_count(regs[-1])
    res.add("alpha=3/5 island pair is disjoint", hits == 0, f"{hits} joint hits")
    return res


CRITERIA = (crit1, crit2, crit3, crit4, crit5, crit6, crit7, crit8, crit9, crit10)


def run_one(number: int, quick: bool = False) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[number - 1](quick)
    res.seconds = time.perf_counter() - t0
    return res


def run_all(quick: bool = False, only=None) -> list[CriterionResult]:
    numbers = sorted(set(only)) if only else range(1, len(CRITERIA) + 1)
    return [run_one(k, quick) for k in numbers]


def format_result(r: CriterionResult, verbose: bool = True) -> list[str]:
    ok = sum(c.passed for c in r.checks)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  criterion {r.number:2d}  {r.title}  "
             f"[{ok}/{len(r.checks)} checks, {r.seconds:.1f} s]"]
    if verbose:
        for c in r.checks:
            if not c.passed:
                lines.append(f"        fail: {c.name}: {c.detail}")
    return lines


def format_results(results) -> list[str]:
    return [line for r in results for line in format_result(r)]
