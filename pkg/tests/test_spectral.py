from __future__ import annotations

import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motivic_ext.classical import MissingTopTable, load_ext_top
from motivic_ext.cobar import Tridegree, Window, ext_E0
from motivic_ext.coefficients import VcdInfinite, builtin, ell_adic_valuation, multiplicative_order, profile_finite_field_odd
from motivic_ext.spectral import (
    MissingProductData,
    NonIncreasingSequence,
    OutsideValidityRegion,
    Tower,
    adams_hz_e2,
    build_numberfield_tower,
    ceiling_violations,
    exponent_bound,
    exponent_bounds,
    filtration_finiteness_violations,
    general_bockstein_e1,
    image_log_order,
    iso_range_shadow,
    lim1_witness,
    ml_diagnose,
    strong_convergence_report,
)

E1_WINDOW = Window(6, 0, 19, -6, 10)
ODD_FIELDS = [(7, 3), (2, 3), (4, 3), (2, 5), (3, 7), (19, 3)]


def _odd(q, ell):
    return profile_finite_field_odd(q, ell, cap=40)


def _e1_oracle(q, ell, d, n):
    """E1 from number theory: H^{0,w}, H^{1,w} live for d | w and B H^{1,*} = H^{1,*}
    exactly when l || q^d - 1 (lifting the exponent gives v_l(q^w - 1) = v_l(q^d - 1) + v_l(w/d))."""
    order = multiplicative_order(q, ell)
    beta_live = ell_adic_valuation(q**order - 1, ell) == 1
    table = load_ext_top(ell)
    total = 0
    for p in (0, 1):
        tp = d.t + p
        for qq in range(0, 41):
            wp = d.w + qq
            if tp < 2 * wp:
                break
            if qq % order or (p == 1 and qq == 0) or wp < 0 or tp < d.s:
                continue
            if p == 0:
                f = 1 if n == 0 else 0
            else:
                f = int(beta_live) if n == 1 else int(not beta_live)
            if f:
                total += table.dim(d.s, tp, wp)
    return total


@pytest.mark.parametrize("q,ell", ODD_FIELDS)
def test_bockstein_e1_matches_convolution_oracle(q, ell):
    page = general_bockstein_e1(_odd(q, ell), E1_WINDOW)
    for d in E1_WINDOW.cells():
        for n in (0, 1):
            assert page.dim(d.s, d.t, d.w, n) == _e1_oracle(q, ell, d, n), (d, n)
    assert all(n in (0, 1) for (_, _, _, n) in page.cells)


@pytest.mark.parametrize("q,ell", ODD_FIELDS)
def test_bockstein_e1_filtration_finiteness(q, ell):
    page = general_bockstein_e1(_odd(q, ell), E1_WINDOW)
    assert page.cells
    assert filtration_finiteness_violations(page) == []


def test_vanishing_bockstein_leaves_only_filtration_zero():
    # 19 - 1 = 18 is divisible by 9, so beta = 0 on H(F_19; Z/3)
    page = general_bockstein_e1(_odd(19, 3), E1_WINDOW)
    assert page.cells
    assert {n for (_, _, _, n) in page.cells} == {0}


def test_bockstein_e1_needs_table_range():
    with pytest.raises(MissingTopTable):
        general_bockstein_e1(_odd(7, 3), Window(6, 0, 20, -6, 10))


def test_bockstein_needs_product_data():
    prof = replace(_odd(7, 3), zeta_period=None)
    with pytest.raises(MissingProductData):
        general_bockstein_e1(prof, Window(2, 0, 6, 0, 2))


def test_bockstein_rejects_even_prime():
    with pytest.raises(ValueError):
        general_bockstein_e1(builtin("C"), Window(2, 0, 6, 0, 2))


@pytest.mark.parametrize("q,ell", ODD_FIELDS)
def test_iso_range_shadow_matches(q, ell):
    cells = iso_range_shadow(_odd(q, ell), E1_WINDOW)
    assert len(cells) > 1000
    assert [c for c in cells if c.status != "match"] == []


def test_bockstein_page_tsv():
    page = general_bockstein_e1(_odd(7, 3), Window(2, 0, 8, 0, 2))
    lines = page.to_tsv().splitlines()
    assert lines[0] == "s\tt\tw\tn\tdim"
    assert len(lines) == len(page.cells) + 1


@pytest.mark.parametrize("name", ["C", "R", "F_3", "F_7@3"])
def test_adams_hz_e2_equals_e0(name):
    k = builtin(name)
    win = Window(6, 0, 12, -2, 8)
    hz, e0 = adams_hz_e2(k, win), ext_E0(k, win)
    assert hz.dims == e0.dims


def test_adams_hz_e2_is_h0_periodic():
    k = builtin("R")
    chart = adams_hz_e2(k, Window(6, 0, 12, -2, 8))
    for d, v in chart.dims.items():
        if d.s >= 1 and d.s < 6:
            assert chart.dims.get(Tridegree(d.s + 1, d.t + 1, d.w), v) == v


# ---------------------------------------------------------------------------
# towers


def _brute_image_log(m, target, ell):
    mods = [ell**e for e in target]
    seen = {tuple(0 for _ in target)}
    frontier = list(seen)
    cols = [tuple(int(m[i, j]) % mods[i] for i in range(len(target))) for j in range(m.shape[1])]
    while frontier:
        nxt = []
        for x in frontier:
            for c in cols:
                y = tuple((a + b) % q for a, b, q in zip(x, c, mods))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return round(math.log(len(seen), ell))


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([2, 3]),
    st.lists(st.integers(1, 3), min_size=1, max_size=3),
    st.integers(1, 3),
    st.data(),
)
def test_image_log_order_matches_enumeration(ell, target, ncols, data):
    entries = data.draw(st.lists(st.integers(-20, 20), min_size=len(target) * ncols, max_size=len(target) * ncols))
    m = np.array(entries, dtype=np.int64).reshape(len(target), ncols)
    assert image_log_order(m, target, ell) == _brute_image_log(m, target, ell)


def test_constant_tower_stabilizes_at_zero():
    t = Tower(3, [(1, 2)] * 4, [np.eye(2, dtype=np.int64)] * 3)
    assert str(ml_diagnose(t, 3)) == "Stabilizes(at=0)"


def test_cyclic_tower_with_doubling_fails():
    t = Tower(2, [(3,)] * 4, [np.array([[2]])] * 3)
    v = ml_diagnose(t, 3)
    assert v.kind == "FailsThroughDepth"
    assert v.chains[0] == [3, 2, 1, 0]


def test_numberfield_tower_consecutive_fails():
    t = build_numberfield_tower(range(1, 65), 2)
    assert len(t) == 64
    v = ml_diagnose(t, 63)
    assert str(v) == "FailsThroughDepth(depth=63, level=0)"
    assert v.chains[0] == list(range(64, 0, -1))


def test_numberfield_tower_bounded_stabilizes():
    assert str(ml_diagnose(build_numberfield_tower((3, 3, 3), 3), 2)) == "Stabilizes(at=0)"


def test_empty_sequence_gives_zero_tower():
    t = build_numberfield_tower((), 2)
    assert t.groups == [()]
    assert str(ml_diagnose(t, 0)) == "Stabilizes(at=0)"


@pytest.mark.parametrize("kj", [(3, 2), (0, 1), (2, 2, 1)])
def test_decreasing_sequence_rejected(kj):
    with pytest.raises(NonIncreasingSequence):
        build_numberfield_tower(kj, 2)


def test_depth_outside_tower():
    with pytest.raises(ValueError):
        ml_diagnose(build_numberfield_tower((1, 2, 3), 2), 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.sampled_from([2, 3, 5]), st.data())
def test_consecutive_sequences_fail_at_every_depth(length, ell, data):
    t = build_numberfield_tower(range(1, length + 1), ell)
    depth = data.draw(st.integers(1, len(t) - 1))
    assert ml_diagnose(t, depth).kind == "FailsThroughDepth"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 8), st.sampled_from([2, 3]), st.data())
def test_bounded_exponent_stabilizes(c, mult, ell, data):
    t = build_numberfield_tower((c,) * mult, ell)
    depth = data.draw(st.integers(0, len(t) - 1))
    assert str(ml_diagnose(t, depth)) == "Stabilizes(at=0)"


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=8, unique=True))
def test_chain_at_level_zero_drops_at_each_kj(values):
    kj = tuple(sorted(values))
    t = build_numberfield_tower(kj, 2)
    v = ml_diagnose(t, len(t) - 1)
    chain = v.chains[0]
    drops = [k for k in range(1, len(chain)) if chain[k] < chain[k - 1]]
    assert drops == [k for k in kj if k < max(kj)]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 20), min_size=1, max_size=6))
def test_tower_composites_and_text_roundtrip(values):
    kj = tuple(sorted(values))
    t = build_numberfield_tower(kj, 3)
    for r, k in itertools.product(range(len(t)), range(3)):
        if r + k >= len(t):
            continue
        m = np.eye(len(t.groups[r]), dtype=np.int64)
        for i in range(k):
            m = m @ t.maps[r + i]
        assert np.array_equal(np.asarray(t.composite(r, k), dtype=np.int64), m)
    back = Tower.from_text(t.to_text())
    assert back.groups == t.groups and back.kj == t.kj and back.label == t.label
    assert all(np.array_equal(a, b) for a, b in zip(back.maps, t.maps))


def test_lim1_witness_levels():
    t = build_numberfield_tower((1, 2, 4), 2)
    # l^{k_j - 1} e_j first dies one level later
    assert lim1_witness(t) == [(0, 0), (1, 0), (3, 0)]


# ---------------------------------------------------------------------------
# exponent bounds


def test_exponent_bound_examples():
    assert exponent_bound(2, 5, 2, vcd=0) == 5
    assert exponent_bound(5, 6, 3) == 1
    assert exponent_bound(2, 3, -5, vcd=1) == 5
    assert exponent_bound(3, 4, -2) == 6


@pytest.mark.parametrize("ell,t,w", [(2, 1, 0), (2, 4, 4), (3, 0, -1), (5, 3, 5)])
def test_exponent_bound_outside_region(ell, t, w):
    with pytest.raises(OutsideValidityRegion):
        exponent_bound(ell, t, w, vcd=0)


def test_exponent_bound_needs_vcd():
    with pytest.raises(VcdInfinite):
        exponent_bound(2, 5, 2)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(2, 40), st.integers(-20, 20), st.integers(0, 3))
def test_exponent_bound_monotone_in_t(ell, t, w, vcd):
    if t - w <= 0:
        return
    assert exponent_bound(ell, t + 1, w, vcd) >= exponent_bound(ell, t, w, vcd)


def test_exponent_table_shape():
    table = exponent_bounds(builtin("R"))
    assert len(table.values) == 400
    assert table.values[(5, 2)] == 5
    assert table.values[(1, 0)] is None
    assert len(table.to_tsv().splitlines()) == 401


def test_ceiling_on_real_chart(real_small):
    _, chart = real_small
    assert ceiling_violations(chart, 0) == []


def test_ceiling_detects_planted_class(real_small):
    _, chart = real_small
    bad = replace(chart, dims=dict(chart.dims))
    d = Tridegree(6, 8, 0)  # stem 2, m = 2, s = 6 > 3
    bad.dims[d] = 1
    assert ceiling_violations(bad, 0) == [d]


# ---------------------------------------------------------------------------
# strong convergence


def test_strong_convergence_report_over_r():
    win = Window(8, 0, 12, -2, 8)
    tower = build_numberfield_tower(range(1, 9), 2)
    report = {(c.stem, c.w): c for c in strong_convergence_report(builtin("R"), win, towers={(-1, -2): tower})}
    assert report[(3, 3)].classification == "MW-0 convergent"
    col = report[(3, 0)]
    assert col.classification == "positive-stem convergent"
    assert col.s0 is not None and "s0" in col.note
    assert report[(-1, -2)].classification == "not strongly convergent"
    assert report[(-1, -1)].classification == "MW-0 convergent"
    assert report[(-1, 0)].classification == "diagnostic-only"
    stems = {c.stem for c in report.values()}
    assert min(stems) == -8 and max(stems) == 12
