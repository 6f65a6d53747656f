"""Annulus gluing and the radial barrier competitor."""

import math

import numpy as np
import pytest

import perimeter_phase as pp
from perimeter_phase.errors import (
    BudgetExceededError,
    DomainError,
    InfeasibleGlueError,
)


def radial(domain):
    if domain.dim == 1:
        return np.abs(domain.nodes_x)
    return np.hypot(domain.nodes_x, domain.nodes_y)


def test_annulus_spec_derived_quantities():
    spec = pp.AnnulusSpec(0.6, 0.2, 1.0)
    assert spec.theta == pytest.approx(16.0 * 1.0 / 0.2, rel=1e-14)
    assert spec.outer_radius == pytest.approx(0.8, rel=1e-14)
    with pytest.raises(DomainError):
        pp.AnnulusSpec(-0.1, 0.2, 1.0)
    with pytest.raises(DomainError):
        pp.AnnulusSpec(0.6, 0.0, 1.0)


def test_glue_identical_states_is_idempotent():
    dom = pp.Domain.ball(1.0, 128)
    eps = 1e-2
    vals = pp.transition_profile(eps, 0.4 - radial(dom))
    state = pp.PhaseState(pp.ScalarField(dom, vals), eps, 1.0)
    out, report = pp.glue(state, state, pp.AnnulusSpec(0.6, 0.2, 1.0), budget=0.1)
    assert np.array_equal(out.values, state.values)
    assert report.excess <= 1e-12
    assert report.l2_gap_outside == 0.0


def test_glue_exact_zones_and_ordering():
    # ordered pair: u (outer) has the larger positivity set
    dom = pp.Domain.ball(1.0, 256)
    eps = 1e-2
    r = radial(dom)
    u_vals = pp.transition_profile(eps, 0.45 - r)
    v_vals = pp.transition_profile(eps, 0.25 - r)
    outer = pp.PhaseState(pp.ScalarField(dom, u_vals), eps, 1.0)
    inner = pp.PhaseState(pp.ScalarField(dom, v_vals), eps, 1.0)
    spec = pp.AnnulusSpec(0.6, 0.2, 1.0)
    out, report = pp.glue(inner, outer, spec, budget=0.5)
    assert len(report.stages) == 1
    assert report.stages[0].direction == "rising"
    inner_zone = r <= spec.rho
    outer_zone = r > spec.outer_radius
    assert np.array_equal(out.values[inner_zone], inner.values[inner_zone])
    assert np.array_equal(out.values[outer_zone], outer.values[outer_zone])
    # ordered inputs stay sandwiched
    assert np.all(out.values >= inner.values - 1e-15)
    assert np.all(out.values <= outer.values + 1e-15)
    assert report.excess <= 0.5
    assert spec.rho + spec.delta / 8.0 <= report.r_star <= spec.rho + spec.delta / 4.0


def test_glue_constant_states_1d_ramp():
    # u = +M, v = -M: the output must ramp across the annulus; its energy
    # is set by the profile slope theta = 16 M / delta
    dom = pp.Domain.interval(-1.0, 1.0, 4096)
    eps = 1e-2
    ones = np.ones(dom.node_shape)
    outer = pp.PhaseState(pp.ScalarField(dom, ones.copy()), eps, 1.0)
    inner = pp.PhaseState(pp.ScalarField(dom, -ones.copy()), eps, 1.0)
    spec = pp.AnnulusSpec(0.6, 0.2, 1.0)
    out, report = pp.glue(inner, outer, spec, budget=400.0)
    assert [s.direction for s in report.stages] == ["rising"]
    # frozen from a direct evaluation; about 2 ramps of 2 theta M each
    assert report.annulus_energy == pytest.approx(319.279391, abs=1e-4)
    assert report.excess == pytest.approx(319.437237, abs=1e-4)
    assert report.within_third is False
    # the scan stays inside its window
    assert 0.625 <= report.r_star <= 0.65
    # output is monotone in |x| across the rising annulus
    x = dom.nodes_x
    band = (np.abs(x) >= 0.6) & (np.abs(x) <= 0.8)
    assert np.all(np.abs(out.values[band]) <= 1.0 + 1e-12)
    assert np.array_equal(out.values[np.abs(x) <= 0.6], inner.values[np.abs(x) <= 0.6])


def test_glue_budget_exceeded():
    dom = pp.Domain.interval(-1.0, 1.0, 4096)
    eps = 1e-2
    ones = np.ones(dom.node_shape)
    outer = pp.PhaseState(pp.ScalarField(dom, ones.copy()), eps, 1.0)
    inner = pp.PhaseState(pp.ScalarField(dom, -ones.copy()), eps, 1.0)
    with pytest.raises(BudgetExceededError) as err:
        pp.glue(inner, outer, pp.AnnulusSpec(0.6, 0.2, 1.0), budget=1.0)
    assert err.value.excess == pytest.approx(318.437237, abs=1e-4)


def test_glue_infeasible_under_sqrt_convention():
    # with tail slope sqrt(theta) the ramp cannot reach the bound within
    # delta/8, so the saturation precondition fails for small delta
    dom = pp.Domain.interval(-1.0, 1.0, 4096)
    eps = 1e-2
    ones = np.ones(dom.node_shape)
    outer = pp.PhaseState(pp.ScalarField(dom, ones.copy()), eps, 1.0)
    inner = pp.PhaseState(pp.ScalarField(dom, -ones.copy()), eps, 1.0)
    with pytest.raises(InfeasibleGlueError) as err:
        pp.glue(
            inner,
            outer,
            pp.AnnulusSpec(0.6, 0.2, 1.0),
            budget=400.0,
            convention=pp.TAIL_SLOPE_SQRT_THETA,
        )
    assert err.value.delta_min == pytest.approx(3.5146651, abs=1e-4)


def test_glue_two_stage_for_unordered_states():
    dom = pp.Domain.ball(1.0, 256)
    eps = 1e-2
    zeros = np.zeros(dom.node_shape)
    pair_a = pp.SharpPair(
        pp.ScalarField(dom, zeros.copy()), region=pp.Disc((0.0, 0.0), 0.25)
    )
    pair_b = pp.SharpPair(
        pp.ScalarField(dom, zeros.copy()), region=pp.Disc((0.1, 0.0), 0.25)
    )
    u, _ = pp.build_recovery(pair_a, eps)
    v, _ = pp.build_recovery(pair_b, eps)
    assert not np.all(u.values >= v.values)
    assert not np.all(v.values >= u.values)
    spec = pp.AnnulusSpec(0.6, 0.2, 1.0)
    out, report = pp.glue(inner_state=v, outer_state=u, spec=spec, budget=0.1)
    assert [s.direction for s in report.stages] == ["rising", "falling"]
    r = radial(dom)
    assert np.array_equal(out.values[r <= 0.6], v.values[r <= 0.6])
    assert np.array_equal(out.values[r > 0.8], u.values[r > 0.8])
    # both states are saturated negative across the annulus, so gluing
    # changes nothing and the excess vanishes identically
    assert report.excess == 0.0
    assert report.l2_gap_outside == 0.0
    assert report.phase_l1_gap_outside == 0.0


def test_glue_rejects_mismatched_states():
    dom = pp.Domain.ball(1.0, 128)
    other = pp.Domain.ball(1.0, 64)
    eps = 1e-2
    a = pp.PhaseState(pp.ScalarField(dom, np.zeros(dom.node_shape)), eps, 1.0)
    b = pp.PhaseState(pp.ScalarField(other, np.zeros(other.node_shape)), eps, 1.0)
    spec = pp.AnnulusSpec(0.6, 0.2, 1.0)
    with pytest.raises(DomainError):
        pp.glue(a, b, spec, budget=1.0)
    c = pp.PhaseState(pp.ScalarField(dom, np.zeros(dom.node_shape)), 2e-2, 1.0)
    with pytest.raises(DomainError):
        pp.glue(a, c, spec, budget=1.0)
    with pytest.raises(DomainError):
        pp.glue(a, a, spec, budget=0.0)
    # annulus sticking out of the domain
    with pytest.raises(DomainError):
        pp.glue(a, a, pp.AnnulusSpec(0.9, 0.3, 1.0), budget=1.0)


def test_sandwich_volumes_fubini():
    # integrating the sandwich volumes over levels recovers the weighted
    # L1 norm of (outer - inner)+
    dom = pp.Domain.box(-1.0, 1.0, 64)
    rng = np.random.default_rng(67)
    inner = np.clip(rng.normal(-0.2, 0.2, dom.node_shape), -0.9, 0.9)
    outer = inner + np.abs(rng.normal(0.3, 0.2, dom.node_shape))
    outer = np.clip(outer, -0.9, 0.9)
    inner = np.minimum(inner, outer)
    levels = np.linspace(-1.0, 1.0, 4001)
    vols = pp.sandwich_volumes(inner, outer, levels, dom)
    integral = np.trapezoid(vols, levels)
    direct = float(np.sum(dom.node_weights * np.maximum(outer - inner, 0.0)))
    assert integral == pytest.approx(direct, rel=2e-3)


def test_barrier_1d_bound():
    dom = pp.Domain.interval(-1.0, 1.0, 4096)
    result = pp.build_barrier(dom, interface_radius=0.5, bound_m=1.0, epsilon=1e-3)
    # two boundary points, tent slope 4 over two side intervals of width 1/2
    expected_bound = pp.c0() * 2.0 + 16.0 + 1.0
    assert result.bound == pytest.approx(expected_bound, rel=1e-12)
    assert result.feasible
    assert result.energy.total <= result.bound
    # the interface sits at |x| = R: value crosses zero there
    x = dom.nodes_x
    signs = np.sign(result.state.values)
    assert np.all(signs[np.abs(x) < 0.45] > 0)
    assert np.all(signs[np.abs(x) > 0.55] < 0)


def test_barrier_2d_bound():
    dom = pp.Domain.ball(1.0, 256)
    result = pp.build_barrier(dom, interface_radius=0.5, bound_m=1.0, epsilon=1e-2)
    expected_bound = pp.c0() * math.pi + 16.0 * math.pi * 0.75 + 1.0
    assert result.bound == pytest.approx(expected_bound, rel=1e-12)
    assert result.feasible
    assert result.energy.total <= result.bound * 1.02


def test_barrier_composition_is_continuous_on_the_grid():
    # largest jump between neighboring nodes stays of order h * slope
    dom = pp.Domain.interval(-1.0, 1.0, 4096)
    result = pp.build_barrier(dom, interface_radius=0.5, bound_m=1.0, epsilon=1e-3)
    vals = result.state.values
    max_jump = np.max(np.abs(np.diff(vals)))
    # steepest feature is the profile core at slope 1/sqrt(eps)
    assert max_jump <= 2.0 * dom.h / math.sqrt(1e-3)


def test_barrier_infeasible_at_large_scale():
    dom = pp.Domain.interval(-1.0, 1.0, 1024)
    result = pp.build_barrier(dom, interface_radius=0.5, bound_m=1.0, epsilon=1.0)
    assert not result.feasible
    assert result.epsilon_threshold == pytest.approx(0.0625, rel=1e-6)
    # the state is still built and amplitude-consistent
    assert np.max(np.abs(result.state.values)) <= result.state.bound_m + 1e-12


def test_barrier_threshold_scaling():
    # the shift condition slope * t_band <= M / 2 controls the threshold:
    # halving (1 - R) doubles the slope and tightens the scale
    dom = pp.Domain.interval(-1.0, 1.0, 1024)
    t_wide = pp.barrier_feasibility_threshold(dom, 0.5, 1.0)
    t_narrow = pp.barrier_feasibility_threshold(dom, 0.75, 1.0)
    assert t_narrow < t_wide


def test_barrier_rejects_bad_radius():
    dom = pp.Domain.interval(-1.0, 1.0, 256)
    with pytest.raises(DomainError):
        pp.build_barrier(dom, interface_radius=1.5, bound_m=1.0, epsilon=1e-3)
    with pytest.raises(DomainError):
        pp.build_barrier(dom, interface_radius=0.0, bound_m=1.0, epsilon=1e-3)
