"""Constraint regions: validation, complement sampling, feasibility witnesses.

A region pair consists of a symmetric set where the optimized function may be
positive (omega_plus, containing the identity) and a symmetric set where it
may be negative (omega_minus, possibly the whole group).  The solver needs
the complements: ``a_sample`` are the class representatives where the
function must be <= 0, ``b_sample`` where it must be >= 0.

On finite kinds sets are given by grid elements and sampling is exhaustive,
so every statement about the sampled problem is a statement about the true
problem.  On the circle and sphere only closed arcs/caps are supported; that
keeps every point of the boundary inside the constraint set and makes the
sampled rows include the exact boundary angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .spectra import CirclePair, DihedralPair, FiniteAbelian, SpherePair

_ANGLE_SLOP = 1e-12


@dataclass(frozen=True)
class RegionPair:
    plus_set: frozenset | None  # grid indices, finite kinds
    minus_set: frozenset | None  # None when omega_minus is the whole group
    plus_angle: float | None  # continuous kinds
    minus_angle: float | None
    minus_is_all: bool
    a_sample: tuple
    b_sample: tuple
    assumption_o: str

    def describe(self, structure) -> str:
        if structure.continuous:
            unit = "rev" if structure.kind == "circle" else "rad"
            minus = "all" if self.minus_is_all else f"{self.minus_angle} {unit}"
            return f"plus<= {self.plus_angle} {unit}, minus {minus}"
        plus = sorted(structure.point_label(i) for i in self.plus_set)
        minus = (
            "all"
            if self.minus_is_all
            else str(sorted(structure.point_label(i) for i in self.minus_set))
        )
        return f"plus={plus} minus={minus}"


def _finite_indices(structure, elements, which):
    out = set()
    for el in elements:
        if isinstance(structure, FiniteAbelian):
            if isinstance(el, int):
                if len(structure.moduli) != 1:
                    raise ValueError(
                        f"{which}: element {el!r} must be a {len(structure.moduli)}-tuple"
                    )
                el = (el % structure.moduli[0],)
            else:
                el = tuple(a % n for a, n in zip(el, structure.moduli))
            if el not in structure.index:
                raise ValueError(f"{which}: {el!r} is not a group element")
            out.add(structure.index[el])
        elif isinstance(structure, DihedralPair):
            rep = min(el % structure.order, (-el) % structure.order)
            out.add(structure.grid.index(rep))
        else:
            raise TypeError(f"finite region on {structure.kind!r} structure")
    return out


def _check_symmetric(structure, idxs, which):
    if isinstance(structure, FiniteAbelian):
        for i in sorted(idxs):
            ni = structure.lift_neg(i)
            if ni not in idxs:
                raise ValueError(
                    f"{which} is not symmetric: contains "
                    f"{structure.point_label(i)} but not {structure.point_label(ni)}"
                )
    # dihedral grid points are already reflection classes


def validate(structure, omega_plus=None, omega_minus="all",
             plus_angle=None, minus_angle=None):
    """Validate a raw region description against a structure.

    Finite kinds take element lists for ``omega_plus`` / ``omega_minus``
    (``omega_minus="all"`` for no negativity constraint).  Continuous kinds
    take closed cap/arc half-widths: radians for the sphere, revolutions for
    the circle.  Passing an already-validated RegionPair re-checks it and
    returns an equal pair.
    """
    if isinstance(omega_plus, RegionPair):
        pair = omega_plus
        if structure.continuous:
            return validate(structure, plus_angle=pair.plus_angle,
                            minus_angle="all" if pair.minus_is_all else pair.minus_angle)
        return validate(
            structure,
            omega_plus=[structure.grid[i] for i in sorted(pair.plus_set)],
            omega_minus="all"
            if pair.minus_is_all
            else [structure.grid[i] for i in sorted(pair.minus_set)],
        )

    if structure.continuous:
        return _validate_continuous(structure, plus_angle, minus_angle)
    if omega_plus is None:
        raise ValueError("omega_plus is required")

    plus = _finite_indices(structure, omega_plus, "omega_plus")
    _check_symmetric(structure, plus, "omega_plus")
    if structure.identity_index not in plus:
        raise ValueError("identity element must belong to omega_plus")

    minus_is_all = isinstance(omega_minus, str) and omega_minus == "all"
    if minus_is_all:
        minus = set(range(len(structure.grid)))
    else:
        minus = _finite_indices(structure, omega_minus, "omega_minus")
        _check_symmetric(structure, minus, "omega_minus")

    a_sample, b_sample = [], []
    for rep, _members in structure.classes:
        if rep not in plus:
            a_sample.append(rep)
        if rep not in minus:
            b_sample.append(rep)

    return RegionPair(
        plus_set=frozenset(plus),
        minus_set=frozenset(minus),
        plus_angle=None,
        minus_angle=None,
        minus_is_all=minus_is_all,
        a_sample=tuple(a_sample),
        b_sample=tuple(b_sample),
        assumption_o="holds-trivially",
    )


def _validate_continuous(structure, plus_angle, minus_angle):
    top = 0.5 if structure.kind == "circle" else math.pi
    unit = "revolutions" if structure.kind == "circle" else "radians"
    if plus_angle is None:
        raise ValueError(f"a positive cap/arc half-width in {unit} is required")
    plus_angle = float(plus_angle)
    if not 0.0 < plus_angle <= top + _ANGLE_SLOP:
        raise ValueError(
            f"plus half-width must lie in (0, {top}] {unit}, got {plus_angle}"
        )
    minus_is_all = minus_angle is None or (
        isinstance(minus_angle, str) and minus_angle == "all"
    )
    if not minus_is_all:
        minus_angle = float(minus_angle)
        if not 0.0 < minus_angle <= top + _ANGLE_SLOP:
            raise ValueError(
                f"minus half-width must lie in (0, {top}] {unit}, got {minus_angle}"
            )
    else:
        minus_angle = None

    # closure of the complement includes the boundary angle itself
    a_sample = tuple(
        xi for xi, t in enumerate(structure.grid)
        if t >= plus_angle - _ANGLE_SLOP and xi != structure.identity_index
    )
    if minus_is_all:
        b_sample = ()
    else:
        b_sample = tuple(
            xi for xi, t in enumerate(structure.grid)
            if t >= minus_angle - _ANGLE_SLOP and xi != structure.identity_index
        )
    return RegionPair(
        plus_set=None,
        minus_set=None,
        plus_angle=plus_angle,
        minus_angle=minus_angle,
        minus_is_all=minus_is_all,
        a_sample=a_sample,
        b_sample=b_sample,
        assumption_o="holds-closed-set",
    )


# ---------------------------------------------------------------------------
# feasibility witnesses
# ---------------------------------------------------------------------------


def witness_function(structure, region: RegionPair):
    """A feasible function: normalized convolution square supported in omega_plus.

    Finite kinds: greedy difference-set construction, exact scalars, exactly
    zero outside omega_plus.  Continuous kinds: spectral square of a half-cap
    indicator, approximately supported (truncation ripple), still positive
    definite and nonnegative by construction.
    """
    if structure.continuous:
        return _continuous_witness(structure, region)

    ctx = structure.ctx
    allowed = {
        i for i in range(structure.lift_size)
        if structure.lift_to_grid(i) in region.plus_set
    }
    v = [0]
    for g in range(1, structure.lift_size):
        if g not in allowed:
            continue
        if all(structure.lift_add(g, structure.lift_neg(x)) in allowed for x in v):
            v.append(g)
    counts = {}
    for a in v:
        for b in v:
            d = structure.lift_add(a, structure.lift_neg(b))
            counts[d] = counts.get(d, 0) + 1
    size = ctx.coerce(len(v))
    values = [ctx.zero] * len(structure.grid)
    for d, c in counts.items():
        values[structure.lift_to_grid(d)] = ctx.coerce(c) / size
    return values


def _continuous_witness(structure, region: RegionPair):
    """Normalized autocorrelation of the half-region indicator on the grid.

    No truncation is involved: the function is positive definite and vanishes
    outside the region *as a function*, so its mean -- the measure of the
    half-region -- is a genuine lower bound for the extremal constant.
    """
    half = region.plus_angle / 2.0
    if isinstance(structure, CirclePair):
        a = region.plus_angle
        return [max(0.0, 1.0 - t / a) for t in structure.grid]
    if isinstance(structure, SpherePair):
        vals = _cap_overlap(structure.dimension, half, structure.grid)
        peak = vals[structure.identity_index]
        return [v / peak for v in vals]
    raise TypeError(f"no witness construction for {structure.kind!r}")


def _cap_overlap(d: int, r: float, angles):
    """Normalized area of the overlap of two angular-radius-r caps on S^d.

    The cap centers sit an angle t apart for each t in ``angles``.  Computed
    by one-dimensional quadrature in the polar angle; the azimuthal slice
    fraction reduces to a regularized incomplete beta.
    """
    import numpy as np
    from scipy.special import betainc

    a = (d - 1) / 2.0
    nodes, glw = np.polynomial.legendre.leggauss(128)
    tfull = 0.5 * math.pi * (nodes + 1.0)
    z_total = float((0.5 * math.pi * glw * np.sin(tfull) ** (d - 1)).sum())
    cos_r = math.cos(r)

    def piece(lo, hi, t):
        psi = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        wpsi = 0.5 * (hi - lo) * glw
        dens = np.sin(psi) ** (d - 1)
        ct, st = math.cos(t), math.sin(t)
        if st < 1e-12:  # the poles: the slice is all or nothing
            frac = (np.cos(psi) * ct >= cos_r).astype(float)
        else:
            cstar = (cos_r - np.cos(psi) * ct) / (np.sin(psi) * st)
            frac = 1.0 - betainc(a, a, (1.0 + np.clip(cstar, -1.0, 1.0)) / 2.0)
        return float((wpsi * dens * frac).sum())

    out = []
    for t in angles:
        # the slice fraction has a kink where the cap boundary crosses the
        # polar circle, at psi = |t - r|; split there so each piece is smooth
        kink = abs(t - r)
        if 1e-12 < kink < r - 1e-12:
            val = piece(0.0, kink, t) + piece(kink, r, t)
        else:
            val = piece(0.0, r, t)
        out.append(val / z_total)
    return out
