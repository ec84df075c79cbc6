import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bound_atlas import regions as rg
from bound_atlas import sampler
from bound_atlas.acceptance import oracle_disagreements
from bound_atlas.simplex import horodecki_Q


@pytest.fixture(scope="module")
def hl3_Q():
    return sampler.sample_hl_Q(3, sampler.RobertsConfig(3), 0, 200_000)


def test_density_examples():
    assert rg.density_region(3, [1 / 9] * 3)
    assert not rg.density_region(3, [0.5, 0.5, 0.5])
    assert rg.density_region(3, horodecki_Q(2.0))
    assert rg.density_region(4, [1 / 16] * 4)
    assert not rg.density_region(4, [-0.01, 0.1, 0.1, 0.1])


def test_ppt_examples():
    assert rg.ppt_region(3, [1 / 9] * 3)
    assert rg.ppt_region(4, [1 / 16] * 4)
    assert not rg.ppt_region(3, horodecki_Q(4.5))
    assert rg.ppt_region(3, horodecki_Q(3.5)) and rg.eval_expr("MUB", horodecki_Q(3.5), 3)


@pytest.mark.parametrize("lam", np.linspace(0, 5, 41))
def test_horodecki_ppt_interval(lam):
    assert rg.ppt_region(3, horodecki_Q(lam)) == (1 - 1e-12 <= lam <= 4 + 1e-12)


def test_ppt_terms_are_the_predicate(hl3_Q):
    terms = rg.ppt_terms_hl3(*hl3_Q[:1000].T)
    assert np.array_equal(np.all(np.stack(terms) <= rg.REGION_TOL, axis=0), rg.ppt_region(3, hl3_Q[:1000]))


@pytest.mark.parametrize("d", [3, 4])
def test_predicates_match_spectra(d):
    o = oracle_disagreements(d, 10_000)
    assert o["density"] == 0 and o["ppt"] == 0
    assert min(o["density_both"]) > 0 and min(o["ppt_both"]) > 0


def test_parse_canonical_forms():
    assert str(rg.parse_expr("PPT ∧ ¬(MUB ∨ Choi(a=1/3))")) == "(PPT & ~(MUB | Choi(a=0.3333333333333333)))"
    assert str(rg.parse_expr("not PPT and JBA(alpha=sqrt(4)/4)")) == "(~PPT & JBA(alpha=0.5))"
    assert str(rg.parse_expr("Choi")) == "Choi(a=1.0)"
    e = rg.parse_expr("PPT & MUB")
    assert rg.parse_expr(str(e)) == e
    assert rg.parse_expr(e) is e


@pytest.mark.parametrize("bad", ["PPT &", "Foo", "Choi(b=1)", 'Choi(a="x")', "PPT + MUB", '__import__("os")', ""])
def test_parse_errors(bad):
    with pytest.raises(rg.ExprError):
        rg.parse_expr(bad)


def test_operators_build_expressions():
    ppt, mub = rg.parse_expr("PPT"), rg.parse_expr("MUB")
    assert str(ppt & ~mub) == "(PPT & ~MUB)"
    assert str(ppt | mub) == "(PPT | MUB)"


def test_family_checks():
    with pytest.raises(ValueError):
        rg.check_family(rg.parse_expr("Chrusc1"), "hl3")
    with pytest.raises(ValueError):
        rg.check_family(rg.parse_expr("JBA"), "full3")
    assert rg.is_slow(rg.parse_expr("PPT"), "full3")
    assert not rg.is_slow(rg.parse_expr("PPT"), "hl3")
    assert rg.is_slow(rg.parse_expr("MUB & CCNR"), "hl3")


def test_region_algebra(hl3_Q):
    ev = lambda e: rg.eval_expr(e, hl3_Q, 3)  # noqa: E731
    assert ev("PPT | ~PPT").all()
    assert not ev("PPT & MUB & Choi").any()
    assert np.array_equal(ev("~(MUB | Choi)"), ev("~MUB & ~Choi"))
    assert np.array_equal(ev("PPT & ~MUB"), ev("PPT") & ~ev("MUB"))
    assert ev("DENSITY").all()
    assert not rg.eval_expr("PPT", horodecki_Q(0.5), 3)
    assert rg.eval_expr("~PPT", horodecki_Q(0.5), 3)


def test_islands_separate_in_Q2(hl3_Q):
    mub = rg.eval_expr("PPT & MUB", hl3_Q, 3)
    choi = rg.eval_expr("PPT & Choi", hl3_Q, 3)
    assert mub.any() and choi.any()
    assert hl3_Q[mub, 1].max() < 1 / 9 < hl3_Q[choi, 1].min()


def test_choi_form_threshold_endpoints(hl3_Q):
    ppt = rg.eval_expr("PPT", hl3_Q, 3)
    assert np.array_equal(rg.eval_expr("PPT & ChoiForm(t=43/32 + 1e-9)", hl3_Q, 3), ppt)
    assert not rg.eval_expr("PPT & ChoiForm(t=-3/16)", hl3_Q, 3).any()
    assert np.array_equal(rg.eval_expr("ChoiForm(t=0)", hl3_Q, 3), rg.eval_expr("Choi", hl3_Q, 3))


def test_structured_and_dense_batches_agree():
    for family, regs in [("hl3", ["PPT", "CCNR", "PPTspec"]), ("full3", ["PPT", "CCNR", "MUB"]), ("full4", ["PPT"])]:
        cfg = sampler.RobertsConfig(sampler.family_dim(family))
        fast = sampler.sample_batch(family, cfg, 0, 2000)
        slow = sampler.sample_batch(family, cfg, 0, 2000, dense=True)
        for e, a, b in zip(regs, rg.evaluate(regs, fast), rg.evaluate(regs, slow)):
            assert np.count_nonzero(a != b) == 0, (family, e)


def test_spectral_ppt_matches_closed_form(hl3_Q):
    b = rg.StateBatch("hl3", Q=hl3_Q[:20_000])
    closed, spectral = rg.evaluate(["PPT", "PPTspec"], b)
    band = np.abs(b.pt_min_eig) < 1e-8
    assert np.count_nonzero((closed != spectral) & ~band) == 0


def test_state_batch_validation():
    with pytest.raises(ValueError):
        rg.StateBatch("hl5", Q=np.zeros((1, 3)))
    with pytest.raises(ValueError):
        rg.StateBatch("hl3", c=np.zeros((1, 3, 3)))


def test_table1_registry():
    doc = json.loads(rg.table1_json())
    assert doc["version"] == rg.TABLE1_VERSION
    assert len(rg.TABLE1) == 20
    ids = [fid for _, _, fid in rg.TABLE1]
    assert len(set(ids)) == 20
    for _, expr, _ in rg.TABLE1:
        rg.parse_expr(expr)


@settings(max_examples=50)
@given(st.floats(0.0, 5.0))
def test_horodecki_line_is_in_density_region(lam):
    assert rg.density_region(3, horodecki_Q(lam))
