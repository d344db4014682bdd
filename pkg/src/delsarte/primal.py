"""Primal side: the spectral minimization and the extremal constant.

Variables are the nonnegative spectral coefficients f(gamma) for gamma beyond
the trivial one (whose coefficient is fixed to 1 by normalizing the mean).
Minimizing sum delta(gamma) s(gamma) f(gamma) subject to the sampled sign
constraints gives the value u; the extremal constant is 1/(s(1) + u).

Constraint rows, per sample point x:
    nonpositivity outside omega_plus:   1 + sum delta f gamma(x) <= eps
    nonnegativity outside omega_minus:  1 + sum delta f gamma(x) >= -eps
At eps = 0 a point under both constraints collapses to a single equality row.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lp import LpProblem, solve_lp
from .regions import RegionPair
from .spectra import analysis, synthesis


@dataclass
class SigmaWeight:
    """The weighting measure: a point mass at the identity plus an absolutely
    continuous part, known through its spectrum s = sigma-hat > 0."""

    form: str  # 'dirac' | 'mixture'
    c: object
    density: list | None
    spectrum: list
    tail_inf: object | None  # lower bound for s over the whole dual, if known

    @classmethod
    def dirac(cls, structure):
        ctx = structure.ctx
        one = ctx.one
        return cls(
            form="dirac",
            c=one,
            density=None,
            spectrum=[one] * len(structure.spectrum),
            tail_inf=one,
        )

    @classmethod
    def mixture(cls, structure, c, density, tail_inf=None):
        ctx = structure.ctx
        c = ctx.coerce(c)
        if ctx.sign(c) < 0:
            raise ValueError("point-mass coefficient must be nonnegative")
        density = [ctx.coerce(v) for v in density]
        if len(density) != len(structure.grid):
            raise ValueError("density must be a grid function")
        for xi, v in enumerate(density):
            if ctx.sign(v) < 0:
                raise ValueError(
                    f"density must be nonnegative; negative at {structure.point_label(xi)}"
                )
        hat = analysis(structure, density)
        spectrum = [c + h for h in hat]
        if tail_inf is None and not structure.continuous:
            # finite dual is complete, so the infimum is just the minimum
            tail_inf = spectrum[0]
            for v in spectrum[1:]:
                if ctx.sign(v - tail_inf) < 0:
                    tail_inf = v
        elif tail_inf is not None:
            tail_inf = ctx.coerce(tail_inf)
        sig = cls(form="mixture", c=c, density=density, spectrum=spectrum,
                  tail_inf=tail_inf)
        sig.check_wiener(structure)
        return sig

    def check_wiener(self, structure):
        ctx = structure.ctx
        for gi, v in enumerate(self.spectrum):
            if ctx.sign(v) <= 0:
                raise ValueError(
                    f"weight spectrum must be strictly positive; "
                    f"s = {ctx.to_float(v):g} at spectrum index {gi}"
                )

    def total_mass(self):
        """sigma(G) = s at the trivial spherical function."""
        return self.spectrum[0]

    def value_by_degree(self, structure, k):
        """s(gamma_k) for degrees beyond the truncation (continuous kinds)."""
        if k < len(self.spectrum):
            return self.spectrum[k]
        if self.form == "dirac":
            return structure.ctx.one
        acc = self.c
        for xi, (w, v) in enumerate(zip(structure.weights, self.density)):
            acc = acc + w * v * structure.value_by_degree(k, xi)
        return acc


@dataclass
class PrimalSolution:
    u_value: object
    a_value: object
    epsilon: object
    coefficients: list  # includes the fixed leading 1
    phi: list
    lp_status: str
    lp_path: str
    constraint_sampling: str  # 'exhaustive' | 'sampled'
    max_violation: float | None = None


def _constraint_coeffs(structure, xi):
    """delta(gamma) * gamma(x) for gamma != trivial, cached per structure."""
    cache = getattr(structure, "_row_coeff_cache", None)
    if cache is None:
        cache = {}
        structure._row_coeff_cache = cache
    row = cache.get(xi)
    if row is None:
        row = [
            structure.multiplicity(gi) * structure.char_value(gi, xi)
            for gi in range(1, len(structure.spectrum))
        ]
        cache[xi] = row
    return row


def build_primal(structure, region: RegionPair, sigma: SigmaWeight, epsilon=0):
    ctx = structure.ctx
    eps = ctx.coerce(epsilon)
    if ctx.sign(eps) < 0 or ctx.sign(ctx.one - eps) <= 0:
        raise ValueError("epsilon must lie in [0, 1)")
    nvars = len(structure.spectrum) - 1
    objective = [
        structure.multiplicity(gi) * ctx.coerce(sigma.spectrum[gi])
        for gi in range(1, len(structure.spectrum))
    ]
    rows = []
    b_only = set(region.b_sample) - set(region.a_sample)
    merge = ctx.is_zero(eps)
    for xi in region.a_sample:
        coeffs = _constraint_coeffs(structure, xi)
        if merge and xi in region.b_sample:
            rows.append((coeffs, "==", -ctx.one))
        else:
            rows.append((coeffs, "<=", -ctx.one + eps))
    for xi in region.b_sample:
        if merge and xi not in b_only:
            continue
        rows.append((_constraint_coeffs(structure, xi), ">=", -ctx.one - eps))
    return LpProblem(sense="min", objective=objective, rows=rows)


def solve_primal(structure, region: RegionPair, sigma: SigmaWeight, epsilon=0,
                 *, trace=None, verify_multiplier=10):
    ctx = structure.ctx
    prob = build_primal(structure, region, sigma, epsilon)
    sol = solve_lp(prob, ctx, trace=trace)
    if sol.status != "optimal":
        # the convolution-square witness is always feasible, so anything else
        # indicates an internal modelling bug
        raise RuntimeError(
            f"primal LP reported {sol.status}; this problem is always solvable"
        )
    u = sol.value
    if ctx.sign(u) < 0:
        raise RuntimeError("primal value went negative; broken LP kernel")
    s1 = ctx.coerce(sigma.spectrum[0])
    a_value = ctx.one / (s1 + u)
    coeffs = [ctx.one] + list(sol.x)
    phi = synthesis(structure, coeffs)
    peak = phi[structure.identity_index]
    if ctx.sign(peak - ctx.one) < 0:
        raise RuntimeError("phi at the identity fell below 1")

    result = PrimalSolution(
        u_value=u,
        a_value=a_value,
        epsilon=ctx.coerce(epsilon),
        coefficients=coeffs,
        phi=phi,
        lp_status=sol.status,
        lp_path=sol.path,
        constraint_sampling="sampled" if structure.continuous else "exhaustive",
    )
    if structure.continuous:
        result.max_violation = _refined_violation(
            structure, region, coeffs, float(epsilon), verify_multiplier
        )
    return result


def _refined_violation(structure, region, coeffs, eps, multiplier):
    """Max sign-constraint violation of phi on a grid `multiplier` times finer."""
    from .spectra import CirclePair, SpherePair

    extra = [region.plus_angle]
    if not region.minus_is_all:
        extra.append(region.minus_angle)
    if isinstance(structure, CirclePair):
        fine = CirclePair(structure.truncation,
                          multiplier * (structure.grid_size - 1) + 1,
                          extra_points=extra)
    elif isinstance(structure, SpherePair):
        fine = SpherePair(structure.dimension, structure.truncation,
                          multiplier * structure.grid_size, extra_points=extra)
    else:
        return None
    phi = synthesis(fine, coeffs)
    worst = 0.0
    for t, v in zip(fine.grid, phi):
        if t >= region.plus_angle - 1e-12:
            worst = max(worst, v - eps)
        if not region.minus_is_all and t >= region.minus_angle - 1e-12:
            worst = max(worst, -eps - v)
    return worst


def epsilon_sweep(structure, region, sigma, epsilons, **kw):
    """Solve the relaxed family, preserving the order of the given epsilons."""
    return [solve_primal(structure, region, sigma, e, **kw) for e in epsilons]
