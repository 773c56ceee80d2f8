import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzcalc import (
    AlphaGrid,
    DomainError,
    FivpModel,
    LevelFunctionField,
    StructureError,
    check_level_validity,
    partial_alpha,
    seikkala_verdict,
    solve_decay_closed,
    solve_growth_closed,
    time_derivative,
)

GROWTH = FivpModel.triangular((0.5, 1, 1.5), (2, 4, 6))
DECAY = FivpModel.triangular(-1, (2, 4, 6))


@pytest.fixture(scope="module")
def growth():
    return solve_growth_closed(GROWTH)


@pytest.fixture(scope="module")
def paper():
    return solve_decay_closed(DECAY, "paper")


def constant_field(value=3.0, t_max=2.0):
    const = lambda t, a: np.full(np.broadcast(t, a).shape, value)
    zero = lambda t, a: np.zeros(np.broadcast(t, a).shape)
    return LevelFunctionField.closed_form(const, const, t_max, zero, zero)


def crisp_exponential(k=-0.7, c=4.0, t_max=2.0):
    y = lambda t, a: c * np.exp(k * t) + 0 * a
    dy = lambda t, a: c * k * np.exp(k * t) + 0 * a
    return LevelFunctionField.closed_form(y, y, t_max, dy, dy)


# --- alpha partials ----------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.995, 1.0])
def test_partial_alpha_paper_decay(paper, alpha):
    d1, d2 = partial_alpha(paper, 1.0, alpha, 0.01)
    assert d1 == pytest.approx(2 * math.exp(-1), abs=1e-9)
    assert d2 == pytest.approx(-2 * math.exp(-1), abs=1e-9)


def test_partial_alpha_constant_field():
    assert tuple(map(float, partial_alpha(constant_field(), 0.5, 0.5, 0.01))) == (0.0, 0.0)


def test_growth_alpha_partial_at_boundary(growth):
    # d/dalpha of (2+2a) exp((0.5+0.5a) t) at a=0, t=1 is 2e^0.5 + 2*0.5*e^0.5
    expected = 3 * math.exp(0.5)
    assert float(growth.dalpha(1.0, 0.0)[0]) == pytest.approx(expected, abs=1e-12)
    assert float(partial_alpha(growth, 1.0, 0.0, 0.01)[0]) == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_fd_alpha_partials_converge_second_order(growth, alpha):
    exact = np.array(growth.dalpha(1.5, alpha), dtype=float)
    errs = [np.abs(np.array(partial_alpha(growth, 1.5, alpha, h), dtype=float) - exact).max()
            for h in (0.04, 0.02, 0.01)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) > 1.8


def test_analytic_alpha_partials_match_fd(growth, paper):
    rederived = solve_decay_closed(DECAY, "rederived")
    fuzzy_k = solve_decay_closed(FivpModel.triangular((-1.5, -1, -0.5), (2, 4, 6)), "paper")
    for f in (growth, paper, rederived, fuzzy_k):
        for t in (0.0, 0.7, 2.0):
            a = np.linspace(0.1, 0.9, 9)
            analytic = np.array(f.dalpha(t, a))
            fd = np.array(partial_alpha(f, t, a, 1e-4))
            np.testing.assert_allclose(analytic, fd, rtol=1e-6, atol=1e-6)


def test_partial_alpha_domain(paper):
    with pytest.raises(DomainError):
        partial_alpha(paper, 1.0, 1.2, 0.01)
    with pytest.raises(DomainError):
        partial_alpha(paper, 1.0, 0.5, 0.0)
    with pytest.raises(DomainError):
        partial_alpha(paper, 3.0, 0.5, 0.01)


# --- time derivatives ----------------------------------------------------------


def test_time_derivative_growth_core(growth):
    # c(1) k(1) e^0 = 4 * 1
    assert tuple(map(float, time_derivative(growth, 0.0, 1.0))) == (4.0, 4.0)


def test_time_derivative_constant():
    assert tuple(map(float, time_derivative(constant_field(), 1.0, 0.2))) == (0.0, 0.0)


def test_time_derivative_paper_decay_origin(paper):
    # A11 p - A12 p with A11 = 4, A12 = -2, p = 1
    assert float(time_derivative(paper, 0.0, 0.0)[0]) == pytest.approx(6.0, abs=1e-12)


def test_time_derivative_fd_fallback():
    y = lambda t, a: np.sin(t) + a
    f = LevelFunctionField.closed_form(y, y, 3.0)
    for t in (0.0, 1.0, 3.0):
        d1, _ = time_derivative(f, t, 0.5)
        assert float(d1) == pytest.approx(math.cos(t), abs=1e-4)


def test_time_derivative_domain(growth):
    with pytest.raises(DomainError):
        time_derivative(growth, -0.5, 0.5)


# --- sampled fields ----------------------------------------------------------


def test_sampled_field_hermite_exact_for_cubics():
    g = AlphaGrid.uniform(4)
    t = np.linspace(0, 2, 5)
    cube = lambda tt, aa: tt**3 - 2 * tt + aa
    dcube = lambda tt, aa: 3 * tt**2 - 2 + 0 * aa
    T, A = np.meshgrid(t, g.levels, indexing="ij")
    f = LevelFunctionField.sampled(t, g, cube(T, A), cube(T, A) + 1, dcube(T, A), dcube(T, A))
    tq, aq = np.array([0.13, 0.9, 1.77]), np.array([0.1, 0.5, 0.8])
    np.testing.assert_allclose(f.y1(tq, aq), cube(tq, aq), atol=1e-12)
    np.testing.assert_allclose(f.dy1_dt(tq, aq), dcube(tq, aq), atol=1e-12)
    assert f.y2(t[2], g.levels[3]) == cube(t[2], g.levels[3]) + 1


def test_sampled_field_shape_checks():
    g = AlphaGrid.uniform(2)
    with pytest.raises(StructureError):
        LevelFunctionField.sampled([0, 1], g, np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(StructureError):
        LevelFunctionField.sampled([0.5, 1], g, np.zeros((2, 3)), np.zeros((2, 3)))


# --- level validity -----------------------------------------------------------


def test_level_validity_growth_at_zero(growth):
    assert check_level_validity(growth, 0.0, GROWTH.grid).valid


@pytest.mark.parametrize("t", [0.1, 1.0, 2.0])
def test_level_validity_paper_decay(paper, t):
    assert check_level_validity(paper, t, DECAY.grid).valid


def test_level_validity_crisp_zero_width():
    assert check_level_validity(crisp_exponential(), 1.0, AlphaGrid.uniform(10)).valid


def test_level_validity_detects_crossing():
    y1 = lambda t, a: 1 + t + 0 * a
    y2 = lambda t, a: 2 - t + 0 * a
    f = LevelFunctionField.closed_form(y1, y2, 2.0)
    assert check_level_validity(f, 0.2, AlphaGrid.uniform(4)).valid
    report = check_level_validity(f, 1.0, AlphaGrid.uniform(4))
    assert {v.condition for v in report.violations} == {"iv"}


# --- verdict -----------------------------------------------------------------


def test_verdict_growth_differentiable(growth):
    report = seikkala_verdict(growth, np.linspace(0, 2, 41), GROWTH.grid)
    assert report.differentiable and report.witnesses == ()


def test_verdict_paper_decay_not_differentiable(paper):
    tgrid = np.linspace(0.05, 2, 40)
    report = seikkala_verdict(paper, tgrid, DECAY.grid)
    assert report.value_valid and not report.derivative_valid and not report.differentiable
    assert "dα-y1'" in report.failed_conditions()
    for w in report.witnesses:
        if w.condition == "dα-y1'":
            assert w.magnitude == pytest.approx(-2 * math.exp(-w.t), abs=1e-9)
    assert {w.t for w in report.witnesses} == set(tgrid.tolist())


def test_verdict_crisp_exponential():
    report = seikkala_verdict(crisp_exponential(), np.linspace(0, 2, 11), AlphaGrid.uniform(20))
    assert report.differentiable
    assert report.flat_steps["dα-y1'"] == 11 * 20


def test_verdict_witness_signs():
    # y1' decreasing in alpha and y2' increasing; values fine
    y1 = lambda t, a: a * (1 - t)
    y2 = lambda t, a: 3 - a * (1 - t)
    f = LevelFunctionField.closed_form(y1, y2, 0.5)
    report = seikkala_verdict(f, [0.25], AlphaGrid.uniform(2))
    by_cond = {w.condition: w for w in report.witnesses}
    assert by_cond["dα-y1'"].magnitude == pytest.approx(-1)
    assert by_cond["dα-y2'"].magnitude == pytest.approx(1)


def test_verdict_errors(growth):
    with pytest.raises(DomainError):
        seikkala_verdict(growth, [], GROWTH.grid)
    with pytest.raises(DomainError):
        seikkala_verdict(growth, [0.0, 2.5], GROWTH.grid)


@pytest.mark.parametrize("model, expected", [(GROWTH, True), (DECAY, False)])
def test_verdict_invariant_under_refinement(model, expected):
    tgrid = np.linspace(0, 2, 21)
    for n in (50, 200):
        m = FivpModel.triangular(
            (model.k.support.lo, model.k.core.lo, model.k.support.hi),
            (model.c.support.lo, model.c.core.lo, model.c.support.hi), alpha_n=n)
        f = solve_growth_closed(m) if expected else solve_decay_closed(m, "paper")
        assert seikkala_verdict(f, tgrid, m.grid).differentiable is expected


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 2.0), st.integers(5, 120))
def test_paper_decay_fails_for_any_positive_time(t, n):
    m = FivpModel.triangular(-1, (2, 4, 6), alpha_n=n)
    report = seikkala_verdict(solve_decay_closed(m, "paper"), [t], m.grid)
    assert not report.differentiable
    mags = [w.magnitude for w in report.witnesses if w.condition == "dα-y1'"]
    assert len(mags) == n
    np.testing.assert_allclose(mags, -2 * math.exp(-t), atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(0, 2), min_size=3, max_size=3).map(sorted),
    st.lists(st.floats(0, 10), min_size=3, max_size=3).map(sorted),
)
def test_differentiable_implies_ordered_derivatives(k, c):
    m = FivpModel.triangular(k, c, alpha_n=20)
    f = solve_growth_closed(m)
    tgrid = np.linspace(0, 2, 9)
    report = seikkala_verdict(f, tgrid, m.grid)
    if report.differentiable:
        d1, d2 = time_derivative(f, tgrid[:, None], m.grid.levels[None, :])
        assert np.all(d1 <= d2 + 1e-9)
