"""Dual side: optimizing over signed atomic measures and certifying bounds.

A dual feasible point is a measure mu made of atoms that are nonpositive on
the closure of A (where the primal function must be <= 0) and nonnegative on
the closure of B, subject to mu-hat(gamma) <= s(gamma) off the trivial
spherical function.  The optimum v gives the same extremal constant as the
primal: alpha = 1/(s(1) + v).

Certificates are stored rescaled by alpha, so they witness the decomposition

    alpha * sigma - lambda_G = mu + tau

with tau positive definite of total mass zero (tau-hat >= 0, tau-hat(1) = 0).
Any measure satisfying the support/sign conditions together with that
decomposition proves the rigorous bound A <= alpha: integrating the extremal
function against both sides gives alpha*<phi,sigma> - mean(phi) = mu(phi) +
tau(phi) >= 0 termwise.  Verification needs only the atoms and alpha; it
never trusts the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lp import LpProblem, solve_lp
from .primal import SigmaWeight
from .regions import RegionPair

_FLOAT_TOL = 1e-9
_ANGLE_SLOP = 1e-12


@dataclass
class DualCertificate:
    alpha: object
    z_value: object  # s(1) + v; alpha = 1/z
    minus_atoms: tuple  # (grid index, weight <= 0), support in closure(A)
    plus_atoms: tuple  # (grid index, weight >= 0), support in closure(B)
    tau_spectrum: tuple  # alpha*s - mu-hat on the solve truncation
    tail_sum: object  # sum of |atom weights|
    tail_bound: object | None  # alpha*inf(s) - tail_sum, when inf(s) is known
    recheck_length: int
    arith: str

    def atoms(self):
        return list(self.minus_atoms) + list(self.plus_atoms)

    def mass(self, ctx):
        acc = ctx.zero
        for _, w in self.atoms():
            acc = acc + w
        return acc


@dataclass
class ValidityReport:
    valid: bool
    reasons: tuple
    coverage: str  # 'complete' | 'full-spectrum' | 'truncated-only'
    alpha: object
    recheck_length: int

    def bound_statement(self, ctx) -> str:
        if self.valid:
            return f"extremal constant <= {ctx.serialize(self.alpha)} ({self.coverage})"
        return "no bound certified: " + "; ".join(self.reasons)


def build_dual(structure, region: RegionPair, sigma: SigmaWeight):
    ctx = structure.ctx
    a_set, b_set = set(region.a_sample), set(region.b_sample)
    points = sorted(a_set | b_set)
    signs = []
    for xi in points:
        if xi in a_set and xi in b_set:
            signs.append(0)  # both cones admit this point
        elif xi in a_set:
            signs.append(-1)
        else:
            signs.append(1)
    objective = [-ctx.one] * len(points)  # maximize -mu(G)
    rows = []
    for gi in range(1, len(structure.spectrum)):
        coeffs = [structure.char_value(gi, xi) for xi in points]
        rows.append((coeffs, "<=", ctx.coerce(sigma.spectrum[gi])))
    return LpProblem(sense="max", objective=objective, rows=rows,
                     var_signs=signs), points


def solve_dual(structure, region: RegionPair, sigma: SigmaWeight, *, trace=None,
               recheck_multiplier=4):
    ctx = structure.ctx
    prob, points = build_dual(structure, region, sigma)
    if not points:  # no constrained points at all: the zero measure is optimal
        return ctx.zero, _empty_certificate(structure, sigma, recheck_multiplier)
    sol = solve_lp(prob, ctx, trace=trace)
    if sol.status == "unbounded":
        raise RuntimeError(
            "dual LP unbounded; weak duality rules this out, so the model is broken"
        )
    if sol.status != "optimal":
        raise RuntimeError(f"dual LP reported {sol.status}")
    v = sol.value
    s1 = ctx.coerce(sigma.spectrum[0])
    z = s1 + v
    alpha = ctx.one / z

    minus, plus = [], []
    tail_sum = ctx.zero
    for xi, w in zip(points, sol.x):
        if ctx.is_zero(w):
            continue
        scaled = w * alpha
        if ctx.sign(scaled) < 0:
            minus.append((xi, scaled))
            tail_sum = tail_sum - scaled
        else:
            plus.append((xi, scaled))
            tail_sum = tail_sum + scaled

    tau = [ctx.zero]
    for gi in range(1, len(structure.spectrum)):
        acc = alpha * ctx.coerce(sigma.spectrum[gi])
        for xi, w in minus + plus:
            acc = acc - w * structure.char_value(gi, xi)
        tau.append(acc)

    tail_bound = None
    if sigma.tail_inf is not None:
        tail_bound = alpha * ctx.coerce(sigma.tail_inf) - tail_sum

    if structure.continuous:
        recheck = recheck_multiplier * structure.truncation
    else:
        recheck = len(structure.spectrum)

    cert = DualCertificate(
        alpha=alpha,
        z_value=z,
        minus_atoms=tuple(minus),
        plus_atoms=tuple(plus),
        tau_spectrum=tuple(tau),
        tail_sum=tail_sum,
        tail_bound=tail_bound,
        recheck_length=recheck,
        arith=ctx.name,
    )
    return v, cert


def _empty_certificate(structure, sigma, recheck_multiplier):
    ctx = structure.ctx
    s1 = ctx.coerce(sigma.spectrum[0])
    alpha = ctx.one / s1
    tau = [ctx.zero] + [alpha * ctx.coerce(s) for s in sigma.spectrum[1:]]
    tail_bound = None
    if sigma.tail_inf is not None:
        tail_bound = alpha * ctx.coerce(sigma.tail_inf)
    if structure.continuous:
        recheck = recheck_multiplier * structure.truncation
    else:
        recheck = len(structure.spectrum)
    return DualCertificate(
        alpha=alpha, z_value=s1, minus_atoms=(), plus_atoms=(),
        tau_spectrum=tuple(tau), tail_sum=ctx.zero, tail_bound=tail_bound,
        recheck_length=recheck, arith=ctx.name,
    )


def _point_in_closure_a(structure, region, xi):
    if structure.continuous:
        return structure.grid[xi] >= region.plus_angle - _ANGLE_SLOP
    return xi not in region.plus_set


def _point_in_closure_b(structure, region, xi):
    if region.minus_is_all:
        return False
    if structure.continuous:
        return structure.grid[xi] >= region.minus_angle - _ANGLE_SLOP
    return xi not in region.minus_set


def verify_certificate(structure, region: RegionPair, sigma: SigmaWeight,
                       cert: DualCertificate, *, recheck_multiplier=4):
    """Re-derive every certified inequality from the atoms and alpha alone.

    Checks, in order: atom sign and support against the region; the mass
    identity alpha*sigma(G) - 1 = mu(G) (tau-hat at the trivial function);
    tau-hat >= 0 across an extended spectrum; and the tail condition when a
    lower bound for s is available.  Never raises on bad input; returns the
    reasons instead.
    """
    ctx = structure.ctx
    exact = ctx.exact
    tol = 0 if exact else _FLOAT_TOL
    reasons = []

    def neg(x):  # strictly negative beyond tolerance
        return ctx.to_float(x) < -tol if not exact else ctx.sign(x) < 0

    for xi, w in cert.minus_atoms:
        if ctx.sign(w) > 0:
            reasons.append(f"M* sign violation at {structure.point_label(xi)}")
        if not _point_in_closure_a(structure, region, xi):
            reasons.append(f"M* support violation at {structure.point_label(xi)}")
    for xi, w in cert.plus_atoms:
        if ctx.sign(w) < 0:
            reasons.append(f"L* sign violation at {structure.point_label(xi)}")
        if not _point_in_closure_b(structure, region, xi):
            reasons.append(f"L* support violation at {structure.point_label(xi)}")

    atoms = cert.atoms()
    mass = cert.mass(ctx)
    s1 = ctx.coerce(sigma.spectrum[0])
    resid = cert.alpha * s1 - ctx.one - mass
    if (exact and not ctx.is_zero(resid)) or (not exact and abs(resid) > tol):
        reasons.append(
            "mass identity violated: alpha*sigma(G) - 1 differs from mu(G) "
            f"by {ctx.to_float(resid):.3g}"
        )

    if structure.continuous:
        recheck = max(recheck_multiplier * structure.truncation,
                      cert.recheck_length)
        degrees = range(1, recheck + 1)

        def char(k, xi):
            return structure.value_by_degree(k, xi)

        def s_at(k):
            return ctx.coerce(sigma.value_by_degree(structure, k))
    else:
        recheck = len(structure.spectrum)
        degrees = range(1, recheck)

        def char(k, xi):
            return structure.char_value(k, xi)

        def s_at(k):
            return ctx.coerce(sigma.spectrum[k])

    for k in degrees:
        acc = cert.alpha * s_at(k)
        for xi, w in atoms:
            acc = acc - w * char(k, xi)
        if neg(acc):
            reasons.append(
                f"negative tau-hat at spectrum index {k}: {ctx.to_float(acc):.3g}"
            )
            break

    coverage = "complete" if not structure.continuous else "truncated-only"
    if structure.continuous:
        if sigma.tail_inf is None:
            reasons.append("tail unverified: no lower bound for s available")
        else:
            atom_mass = ctx.zero  # recomputed: stored tail_sum is untrusted
            for _, w in atoms:
                atom_mass = atom_mass + abs(w)
            tail = cert.alpha * ctx.coerce(sigma.tail_inf) - atom_mass
            if neg(tail):
                reasons.append(
                    f"tail unverified: sum of |atoms| exceeds alpha*inf(s) "
                    f"by {-ctx.to_float(tail):.3g}"
                )
            else:
                coverage = "full-spectrum"

    return ValidityReport(
        valid=not reasons,
        reasons=tuple(reasons),
        coverage=coverage,
        alpha=cert.alpha,
        recheck_length=recheck,
    )


# ---------------------------------------------------------------------------
# canonical text format
# ---------------------------------------------------------------------------

CERT_SCHEMA = "delsarte-certificate v1"


def certificate_to_text(cert: DualCertificate, ctx, hashes) -> str:
    """Render a certificate in the canonical re-verifiable text form.

    ``hashes`` maps section names (structure, region, sigma) to hex digests of
    the originating config, binding the certificate to its instance.
    """
    lines = [CERT_SCHEMA]
    for key in ("structure", "region", "sigma"):
        lines.append(f"{key} {hashes[key]}")
    entries = []
    for xi, w in cert.minus_atoms:
        entries.append((xi, "-", ctx.serialize(-w)))
    for xi, w in cert.plus_atoms:
        entries.append((xi, "+", ctx.serialize(w)))
    for xi, sign, mag in sorted(entries):
        lines.append(f"atom {xi} {sign} {mag}")
    lines.append(f"alpha {ctx.serialize(cert.alpha)}")
    lines.append(f"recheck {cert.recheck_length}")
    return "\n".join(lines) + "\n"


class CertificateFormatError(ValueError):
    pass


def certificate_from_text(text: str, ctx):
    """Parse the canonical form back into atoms; inverse of certificate_to_text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CERT_SCHEMA:
        raise CertificateFormatError("missing or unknown certificate schema line")
    hashes = {}
    idx = 1
    for key in ("structure", "region", "sigma"):
        if idx >= len(lines) or not lines[idx].startswith(key + " "):
            raise CertificateFormatError(f"missing {key} hash line")
        hashes[key] = lines[idx].split(" ", 1)[1].strip()
        idx += 1
    minus, plus = [], []
    alpha = None
    recheck = None
    for ln in lines[idx:]:
        parts = ln.split()
        if parts[0] == "atom":
            if len(parts) != 4 or parts[2] not in ("+", "-"):
                raise CertificateFormatError(f"malformed atom line: {ln!r}")
            xi = int(parts[1])
            mag = ctx.parse(parts[3])
            if parts[2] == "-":
                minus.append((xi, -mag))
            else:
                plus.append((xi, mag))
        elif parts[0] == "alpha":
            alpha = ctx.parse(parts[1])
        elif parts[0] == "recheck":
            recheck = int(parts[1])
        else:
            raise CertificateFormatError(f"unknown line: {ln!r}")
    if alpha is None or recheck is None:
        raise CertificateFormatError("certificate is truncated")
    tail = ctx.zero
    for _, w in minus:
        tail = tail - w
    for _, w in plus:
        tail = tail + w
    cert = DualCertificate(
        alpha=alpha,
        z_value=ctx.one / alpha,
        minus_atoms=tuple(minus),
        plus_atoms=tuple(plus),
        tau_spectrum=(),
        tail_sum=tail,
        tail_bound=None,
        recheck_length=recheck,
        arith=ctx.name,
    )
    return cert, hashes
