"""End-to-end instance runs with duality checking, fuzzing, and relaxation studies.

Every run solves both sides and refuses to hand back a result whose primal
and dual values disagree: in exact arithmetic the two linear programs are
transposes of each other, so any nonzero gap is a kernel bug, and the harness
treats it as a theorem violation -- it serializes the offending instance for
post-mortem and raises instead of returning.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass

from .dual import DualCertificate, ValidityReport, solve_dual, verify_certificate
from .primal import PrimalSolution, SigmaWeight, solve_primal
from .regions import RegionPair, validate, witness_function
from .scalars import exact_cosine_context
from .serialize import canonical_json, scalar_str, section_hash
from .spectra import FiniteAbelian, integrate

_FLOAT_GAP_TOL = 1e-8


class StrongDualityViolation(RuntimeError):
    """Exact primal and dual optima disagreed; carries the artifact path."""

    def __init__(self, message, artifact_path=None):
        super().__init__(message)
        self.artifact_path = artifact_path


@dataclass
class DualityReport:
    u_value: object
    v_value: object
    gap: object
    a_value: object
    alpha: object
    witness_mean: object
    primal: PrimalSolution
    certificate: DualCertificate
    validity: ValidityReport
    region: RegionPair
    exact: bool

    def summary(self, ctx) -> dict:
        out = {
            "u": scalar_str(ctx, self.u_value),
            "v": scalar_str(ctx, self.v_value),
            "gap": scalar_str(ctx, self.gap),
            "extremal_value": scalar_str(ctx, self.a_value),
            "certified_bound": scalar_str(ctx, self.alpha),
            "witness_lower_bound": scalar_str(ctx, self.witness_mean),
            "certificate_valid": self.validity.valid,
            "certificate_coverage": self.validity.coverage,
            "arithmetic": ctx.name,
        }
        if self.validity.reasons:
            out["certificate_reasons"] = list(self.validity.reasons)
        if self.primal.max_violation is not None:
            out["refined_grid_violation"] = float(self.primal.max_violation)
        return out


def _violation_artifact(structure, region, sigma, u, v, artifact_dir):
    ctx = structure.ctx
    data = {
        "kind": "theorem-violation",
        "structure": structure.describe(),
        "region": region.describe(structure),
        "sigma_spectrum": [scalar_str(ctx, s) for s in sigma.spectrum],
        "u": scalar_str(ctx, u),
        "v": scalar_str(ctx, v),
        "gap": scalar_str(ctx, u - v),
    }
    path = None
    if artifact_dir is not None:
        os.makedirs(artifact_dir, exist_ok=True)
        path = os.path.join(
            artifact_dir, f"theorem-violation-{section_hash(data)}.json"
        )
        with open(path, "w") as fh:
            fh.write(canonical_json(data))
    return path


def run_instance(structure, region, sigma=None, *, artifact_dir=None, trace=None,
                 verify_multiplier=10):
    """Solve both sides of one instance and cross-check every identity."""
    ctx = structure.ctx
    region = validate(structure, region)
    if sigma is None:
        sigma = SigmaWeight.dirac(structure)

    ps = solve_primal(structure, region, sigma, trace=trace,
                      verify_multiplier=verify_multiplier)
    v, cert = solve_dual(structure, region, sigma)
    gap = ps.u_value - v

    bad = ctx.sign(gap) != 0 if ctx.exact else abs(gap) > _FLOAT_GAP_TOL
    if bad:
        path = _violation_artifact(structure, region, sigma, ps.u_value, v,
                                   artifact_dir)
        where = f"; instance saved to {path}" if path else ""
        raise StrongDualityViolation(
            f"primal value {ctx.to_float(ps.u_value):.12g} != "
            f"dual value {ctx.to_float(v):.12g}{where}",
            artifact_path=path,
        )
    # weak duality holds with equality, so the bound equals the attained value
    unit = ps.a_value * cert.z_value
    unit_ok = ctx.eq(unit, 1) if ctx.exact else abs(unit - 1.0) < _FLOAT_GAP_TOL
    if not unit_ok:
        raise StrongDualityViolation("normalization identity a*(s1+v) = 1 failed")

    validity = verify_certificate(structure, region, sigma, cert)
    if ctx.exact and not structure.continuous and not validity.valid:
        raise StrongDualityViolation(
            "solver produced a certificate its own verifier rejects: "
            + "; ".join(validity.reasons)
        )

    wit = witness_function(structure, region)
    wmean = integrate(structure, wit)
    if not structure.continuous:
        # on a complete spectrum the witness is feasible for the very LP that
        # was solved, so it can never beat the optimum; on continuous
        # structures the witness is exact but the LP is truncated, and the
        # two values merely sandwich the true constant
        excess = ctx.coerce(wmean) - ps.a_value
        beats = ctx.sign(excess) > 0 if ctx.exact else excess > _FLOAT_GAP_TOL
        if beats:
            raise StrongDualityViolation(
                f"witness mean {ctx.to_float(wmean):.12g} exceeds the optimum "
                f"{ctx.to_float(ps.a_value):.12g}"
            )

    return DualityReport(
        u_value=ps.u_value, v_value=v, gap=gap, a_value=ps.a_value,
        alpha=cert.alpha, witness_mean=wmean, primal=ps, certificate=cert,
        validity=validity, region=region, exact=ctx.exact,
    )


# ---------------------------------------------------------------------------
# fuzzing
# ---------------------------------------------------------------------------


def _classes_of(n):
    return [frozenset({x % n, (-x) % n}) for x in range(n // 2 + 1)]


def enumerate_regions(n):
    """All (omega_plus, omega_minus) pairs of symmetric subsets, 0 in omega_plus."""
    classes = _classes_of(n)
    nonzero = classes[1:]
    for bits in itertools.product((False, True), repeat=len(nonzero)):
        plus = set(classes[0])
        for take, cls in zip(bits, nonzero):
            if take:
                plus |= cls
        for mbits in itertools.product((False, True), repeat=len(classes)):
            minus = set()
            for take, cls in zip(mbits, classes):
                if take:
                    minus |= cls
            yield sorted(plus), sorted(minus)


def random_region_pair(n, rng):
    classes = _classes_of(n)
    plus = set(classes[0])
    for cls in classes[1:]:
        if rng.random() < 0.5:
            plus |= cls
    if rng.random() < 0.5:
        minus = "all"
    else:
        minus = set()
        for cls in classes:
            if rng.random() < 0.5:
                minus |= cls
        minus = sorted(minus)
    return sorted(plus), minus


def fuzz_strong_duality(orders, *, trials=None, seed=0, artifact_dir=None,
                        progress=None):
    """Check u == v over many cyclic-group instances in exact arithmetic.

    ``trials=None`` enumerates every symmetric region pair of each order;
    otherwise ``trials`` random pairs per order are drawn from ``seed``.
    Returns a deterministic summary (no timing, nothing environment-bound).
    """
    total = 0
    gaps_zero = True
    by_order = {}
    for n in orders:
        structure = FiniteAbelian([n], ctx=exact_cosine_context(n))
        sigma = SigmaWeight.dirac(structure)
        if trials is None:
            pairs = enumerate_regions(n)
        else:
            rng = random.Random(seed * 1_000_003 + n)
            pairs = (random_region_pair(n, rng) for _ in range(trials))
        count = 0
        for plus, minus in pairs:
            region = validate(structure, omega_plus=plus, omega_minus=minus)
            report = run_instance(structure, region, sigma,
                                  artifact_dir=artifact_dir)
            if not structure.ctx.is_zero(report.gap):
                gaps_zero = False
            count += 1
            total += 1
            if progress is not None and total % 200 == 0:
                progress(total)
        by_order[n] = count
    return {
        "instances": total,
        "by_order": by_order,
        "all_gaps_zero": gaps_zero,
        "mode": "exhaustive" if trials is None else f"random x{trials}",
        "seed": None if trials is None else seed,
    }


# ---------------------------------------------------------------------------
# relaxation limit study
# ---------------------------------------------------------------------------


@dataclass
class EpsilonRow:
    epsilon: object
    u_value: object
    a_value: object


@dataclass
class EpsilonStudy:
    rows: list  # dyadic levels in decreasing epsilon, exact limit last
    k0: int | None  # first level k whose value already equals the limit
    one_sided_law: bool | None  # u(eps) == (1-eps) u(0), one-sided regions only


def epsilon_limit_study(structure, region, sigma=None, *, levels=8):
    """Track the relaxed value along eps = 1/2, 1/4, ... down to the limit.

    Monotonicity of the value in the relaxation is asserted here because its
    failure would mean the feasible sets are not nested -- a model bug, not a
    data property.  Whether the dyadic sequence *stabilizes* at the limit is
    returned as data (k0), not asserted.
    """
    ctx = structure.ctx
    region = validate(structure, region)
    if sigma is None:
        sigma = SigmaWeight.dirac(structure)
    eps_list = [ctx.one / ctx.coerce(2 ** k) for k in range(1, levels + 1)]
    rows = []
    for eps in eps_list + [ctx.zero]:
        sol = solve_primal(structure, region, sigma, epsilon=eps)
        rows.append(EpsilonRow(epsilon=eps, u_value=sol.u_value,
                               a_value=sol.a_value))
    for prev, nxt in zip(rows, rows[1:]):
        if ctx.sign(nxt.u_value - prev.u_value) < 0:
            raise RuntimeError(
                "relaxed value decreased as epsilon shrank: feasible sets "
                "are not nested"
            )
    limit = rows[-1]
    k0 = None
    for k in range(len(eps_list), 0, -1):
        if ctx.eq(rows[k - 1].u_value, limit.u_value):
            k0 = k
        else:
            break
    law = None
    if region.minus_is_all:
        law = all(
            ctx.eq(row.u_value, (ctx.one - row.epsilon) * limit.u_value)
            for row in rows[:-1]
        )
    return EpsilonStudy(rows=rows, k0=k0, one_sided_law=law)
