"""Primal solver oracles: small groups worked out by hand, plus invariants."""

import random

import pytest

from delsarte.primal import SigmaWeight, build_primal, epsilon_sweep, solve_primal
from delsarte.regions import validate, witness_function
from delsarte.scalars import exact_cosine_context, rational
from delsarte.spectra import CirclePair, FiniteAbelian, integrate


def z(n):
    return FiniteAbelian([n], ctx=exact_cosine_context(n))


# -- sigma weights -----------------------------------------------------------


def test_dirac_sigma():
    g = z(6)
    s = SigmaWeight.dirac(g)
    assert all(g.ctx.eq(v, 1) for v in s.spectrum)
    assert s.tail_inf == 1
    assert g.ctx.eq(s.total_mass(), 1)


def test_mixture_spectrum_constant_density():
    g = z(4)
    half = rational(1, 2)
    s = SigmaWeight.mixture(g, half, [1, 1, 1, 1])
    # constant density contributes only to the trivial coefficient
    assert [g.ctx.to_float(v) for v in s.spectrum] == [1.5, 0.5, 0.5]
    assert g.ctx.eq(s.total_mass(), rational(3, 2))


def test_mixture_rejects_wiener_failure():
    g = z(4)
    with pytest.raises(ValueError, match="index 1"):
        SigmaWeight.mixture(g, 0, [0, 2, 0, 2])


def test_mixture_rejects_negative_density():
    g = z(4)
    with pytest.raises(ValueError, match="density"):
        SigmaWeight.mixture(g, 1, [0, -1, 0, 0])


def test_dirac_value_beyond_truncation():
    c = CirclePair(truncation=5)
    s = SigmaWeight.dirac(c)
    assert s.value_by_degree(c, 3) == 1
    assert s.value_by_degree(c, 40) == 1


# -- hand-solved instances ---------------------------------------------------


def test_z5_single_point_region():
    # phi <= 0 away from the identity forces the scaled point mass; the
    # optimum is phi = 5*indicator(0) with mean 1/5
    g = z(5)
    reg = validate(g, omega_plus=[0])
    sol = solve_primal(g, reg, SigmaWeight.dirac(g))
    assert g.ctx.eq(sol.u_value, 4)
    assert g.ctx.eq(sol.a_value, rational(1, 5))
    assert g.ctx.eq(sol.phi[0], 5)
    for x in range(1, 5):
        assert g.ctx.is_zero(sol.phi[x])


def test_z6_vanishing_outside_interval():
    # classic order-6 instance: phi supported on {-1,0,1}, zero elsewhere
    g = z(6)
    reg = validate(g, omega_plus=[0, 1, 5], omega_minus=[0, 1, 5])
    sol = solve_primal(g, reg, SigmaWeight.dirac(g))
    assert g.ctx.eq(sol.u_value, 2)
    assert g.ctx.eq(sol.a_value, rational(1, 3))
    expected = [3, rational(3, 2), 0, 0, 0, rational(3, 2)]
    assert all(g.ctx.eq(a, b) for a, b in zip(sol.phi, expected))
    # unique optimum: coefficients (1, 3/4, 1/4, 0)
    coeffs = [1, rational(3, 4), rational(1, 4), 0]
    assert all(g.ctx.eq(a, b) for a, b in zip(sol.coefficients, coeffs))


def test_full_group_region_is_trivial():
    g = z(5)
    reg = validate(g, omega_plus=list(range(5)), omega_minus=list(range(5)))
    sol = solve_primal(g, reg, SigmaWeight.dirac(g))
    assert g.ctx.is_zero(sol.u_value)
    assert g.ctx.eq(sol.a_value, 1)
    assert all(g.ctx.eq(v, 1) for v in sol.phi)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_single_point_value_is_one_over_n(n):
    g = z(n)
    reg = validate(g, omega_plus=[0])
    sol = solve_primal(g, reg, SigmaWeight.dirac(g))
    assert g.ctx.eq(sol.a_value, rational(1, n))


def test_problem_shape_counts():
    g6 = z(6)
    reg = validate(g6, omega_plus=[0, 1, 5], omega_minus=[0, 1, 5])
    prob = build_primal(g6, reg, SigmaWeight.dirac(g6))
    assert len(prob.objective) == 3  # one variable per nontrivial coefficient
    assert len(prob.rows) == 2  # sample points {2, 3} merge to equalities
    assert all(rel == "==" for _, rel, _ in prob.rows)

    g5 = z(5)
    reg5 = validate(g5, omega_plus=[0])
    prob5 = build_primal(g5, reg5, SigmaWeight.dirac(g5))
    assert len(prob5.objective) == 2
    assert [rel for _, rel, _ in prob5.rows] == ["<=", "<="]

    # with slack the merged rows split into a two-sided pair
    prob_eps = build_primal(g6, reg, SigmaWeight.dirac(g6),
                            epsilon=rational(1, 4))
    assert len(prob_eps.rows) == 4
    assert sorted(rel for _, rel, _ in prob_eps.rows) == ["<=", "<=", ">=", ">="]


# -- relaxation behaviour ----------------------------------------------------


def test_relaxation_scales_one_sided_value_exactly():
    # with no lower constraints, (1-eps) phi is feasible for the relaxed
    # problem and the scaling is reversible, so u(eps) = (1-eps) u(0)
    g = z(7)
    reg = validate(g, omega_plus=[0, 1, 6])
    sigma = SigmaWeight.dirac(g)
    base = solve_primal(g, reg, sigma)
    for eps in (rational(1, 2), rational(1, 4), rational(1, 8)):
        sol = solve_primal(g, reg, sigma, epsilon=eps)
        assert g.ctx.eq(sol.u_value, (g.ctx.one - eps) * base.u_value)


def test_relaxation_is_monotone_two_sided():
    g = z(8)
    reg = validate(g, omega_plus=[0, 1, 7], omega_minus=[0, 1, 2, 6, 7])
    sigma = SigmaWeight.dirac(g)
    sols = epsilon_sweep(g, reg, sigma,
                         [rational(1, 2), rational(1, 4), rational(1, 8), 0])
    values = [s.u_value for s in sols]
    for lo, hi in zip(values, values[1:]):
        assert g.ctx.sign(hi - lo) >= 0
    assert [s.epsilon for s in sols][-1] == 0


# -- invariants on random regions --------------------------------------------


def _random_region(g, n, rng, two_sided):
    plus = {0}
    for x in range(1, n // 2 + 1):
        if rng.random() < 0.5:
            plus |= {x % n, (-x) % n}
    minus = "all"
    if two_sided:
        minus = set(plus)
        for x in range(0, n // 2 + 1):
            if rng.random() < 0.3:
                minus |= {x % n, (-x) % n}
        minus = sorted(minus)
    return validate(g, omega_plus=sorted(plus), omega_minus=minus)


@pytest.mark.parametrize("n,two_sided", [(9, False), (9, True), (10, False), (10, True)])
def test_solution_invariants_random_regions(n, two_sided):
    g = z(n)
    rng = random.Random(1000 + n + int(two_sided))
    sigma = SigmaWeight.dirac(g)
    for _ in range(8):
        reg = _random_region(g, n, rng, two_sided)
        sol = solve_primal(g, reg, sigma)
        ctx = g.ctx
        assert ctx.sign(sol.a_value) > 0
        assert ctx.sign(ctx.one - sol.a_value) >= 0
        # normalization: unit mean, and the peak value is 1 + u for point sigma
        assert ctx.eq(integrate(g, sol.phi), 1)
        assert ctx.eq(sol.phi[0], ctx.one + sol.u_value)
        # the sign constraints hold on the whole group by evenness
        for x in range(n):
            if x not in reg.plus_set:
                assert ctx.sign(sol.phi[x]) <= 0
            if not reg.minus_is_all and x not in reg.minus_set:
                assert ctx.sign(sol.phi[x]) >= 0
        # autocorrelation witnesses never beat the optimum
        wit = witness_function(g, reg)
        assert ctx.sign(sol.a_value - integrate(g, wit)) >= 0


# -- continuous structures ---------------------------------------------------


def test_circle_arc_solution():
    # default grid: the refined check must report the real overshoot between
    # sample points honestly instead of hiding it
    coarse = CirclePair(truncation=12)
    reg = validate(coarse, plus_angle=0.15)
    sol = solve_primal(coarse, reg, SigmaWeight.dirac(coarse))
    assert sol.constraint_sampling == "sampled"
    assert sol.max_violation is not None and sol.max_violation > 1e-4

    # pinning the arc endpoint into the grid tames the boundary overshoot
    pinned = CirclePair(truncation=12, grid_size=103, extra_points=[0.15])
    reg = validate(pinned, plus_angle=0.15)
    sol = solve_primal(pinned, reg, SigmaWeight.dirac(pinned))
    assert sol.max_violation < 1e-3
    # witness: arc of diameter 0.15 around the identity has mean 0.15
    assert sol.a_value >= 0.15 - 1e-9
    assert sol.a_value < 0.5
    assert abs(integrate(pinned, sol.phi) - 1) < 1e-9


def test_epsilon_rejects_bad_values():
    g = z(5)
    reg = validate(g, omega_plus=[0])
    with pytest.raises(ValueError):
        solve_primal(g, reg, SigmaWeight.dirac(g), epsilon=1)
    with pytest.raises(ValueError):
        solve_primal(g, reg, SigmaWeight.dirac(g), epsilon=rational(-1, 2))
