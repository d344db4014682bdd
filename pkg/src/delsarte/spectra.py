"""Concrete two-point homogeneous structures and their harmonic analysis.

Each structure bundles an evaluation grid of class representatives, normalized
invariant-measure weights, a (possibly truncated) list of spherical functions
with their dimension weights, and closed-form or recurrence evaluation.  Four
families are supported:

* ``FiniteAbelian(moduli)`` -- products of cyclic groups; the grid is the full
  group, spherical functions are folded real characters.
* ``DihedralPair(n)`` -- rotations modulo reflection; the grid is the set of
  classes {x, -x} in Z_n.
* ``CirclePair(truncation, grid_size)`` -- the circle with reflection, sampled
  on a uniform folded grid; spherical functions are cosines.
* ``SpherePair(dimension, truncation, grid_size)`` -- unit sphere S^d with
  rotations fixing a pole; spherical functions are normalized Gegenbauer
  polynomials evaluated at cos t, sampled on Gauss-Legendre nodes.

Finite kinds carry exact scalars (rational or real cyclotomic); continuous
kinds use floats.
"""

from __future__ import annotations

import itertools
import math
from math import gcd

import numpy as np

from .scalars import FloatContext, ScalarContext, exact_cosine_context


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


class FiniteAbelian:
    """Product of cyclic groups Z_{n1} x ... x Z_{nr}, real folded spectrum."""

    kind = "finite_abelian"
    continuous = False

    def __init__(self, moduli, ctx: ScalarContext | None = None):
        moduli = list(moduli)
        if not moduli or any(n < 1 for n in moduli):
            raise ValueError("moduli must be positive integers")
        self.moduli = moduli
        self.order_lcm = _lcm(moduli)
        if ctx is None:
            ctx = exact_cosine_context(self.order_lcm)
        self.ctx = ctx
        self.grid = list(itertools.product(*[range(n) for n in moduli]))
        self.index = {x: i for i, x in enumerate(self.grid)}
        size = len(self.grid)
        inv_size = ctx.coerce(1) / ctx.coerce(size)
        self.weights = [inv_size] * size
        self.identity_index = 0

        # folded dual: representatives of {k, -k}
        self.spectrum = []
        self._delta = []
        seen = set()
        for k in self.grid:
            nk = self._neg(k)
            if nk in seen:
                continue
            seen.add(k)
            self.spectrum.append(k)
            self._delta.append(ctx.coerce(1 if nk == k else 2))

        # grid classes {x, -x}, used for constraint sampling and dual atoms
        self.classes = []
        cseen = set()
        for i, x in enumerate(self.grid):
            if i in cseen:
                continue
            ni = self.index[self._neg(x)]
            members = [i] if ni == i else [i, ni]
            cseen.update(members)
            self.classes.append((i, members))

        self._char_cache = {}

    def _neg(self, x):
        return tuple((-a) % n for a, n in zip(x, self.moduli))

    # group operations on grid indices (used by witness search)
    @property
    def lift_size(self):
        return len(self.grid)

    def lift_add(self, i, j):
        a, b = self.grid[i], self.grid[j]
        return self.index[tuple((u + v) % n for u, v, n in zip(a, b, self.moduli))]

    def lift_neg(self, i):
        return self.index[self._neg(self.grid[i])]

    def lift_to_grid(self, i):
        return i

    def char_value(self, gi, xi):
        key = (gi, xi)
        hit = self._char_cache.get(key)
        if hit is None:
            k, x = self.spectrum[gi], self.grid[xi]
            N = self.order_lcm
            j = sum(ki * xiv * (N // n) for ki, xiv, n in zip(k, x, self.moduli)) % N
            hit = self.ctx.cos_two_pi(j, N)
            self._char_cache[key] = hit
        return hit

    def multiplicity(self, gi):
        return self._delta[gi]

    def point_label(self, xi):
        x = self.grid[xi]
        return str(x[0]) if len(self.moduli) == 1 else str(x)

    def describe(self):
        if len(self.moduli) == 1:
            return f"cyclic group of order {self.moduli[0]}"
        return "product of cyclic groups " + "x".join(str(n) for n in self.moduli)


class DihedralPair:
    """Classes {x, -x} of Z_n under the reflection subgroup."""

    kind = "dihedral"
    continuous = False

    def __init__(self, order: int, ctx: ScalarContext | None = None):
        if order < 1:
            raise ValueError("order must be positive")
        self.order = order
        if ctx is None:
            ctx = exact_cosine_context(order)
        self.ctx = ctx
        half = order // 2
        self.grid = list(range(half + 1))
        inv_n = ctx.coerce(1) / ctx.coerce(order)
        self.weights = [
            inv_n if (x == 0 or 2 * x == order) else ctx.coerce(2) * inv_n
            for x in self.grid
        ]
        self.identity_index = 0
        self.spectrum = list(range(half + 1))
        self._delta = [
            ctx.coerce(1 if (k == 0 or 2 * k == order) else 2) for k in self.spectrum
        ]
        self.classes = [(i, [i]) for i in range(len(self.grid))]
        self._char_cache = {}

    @property
    def lift_size(self):
        return self.order

    def lift_add(self, i, j):
        return (i + j) % self.order

    def lift_neg(self, i):
        return (-i) % self.order

    def lift_to_grid(self, i):
        return min(i, self.order - i)

    def char_value(self, gi, xi):
        key = (gi, xi)
        hit = self._char_cache.get(key)
        if hit is None:
            j = (self.spectrum[gi] * self.grid[xi]) % self.order
            hit = self.ctx.cos_two_pi(j, self.order)
            self._char_cache[key] = hit
        return hit

    def multiplicity(self, gi):
        return self._delta[gi]

    def point_label(self, xi):
        return "{%d}" % self.grid[xi]

    def describe(self):
        return f"dihedral pair on {self.order} rotations"


class CirclePair:
    """Circle with reflection; grid of folded angles t in [0, 1/2] revolutions."""

    kind = "circle"
    continuous = True

    def __init__(self, truncation: int, grid_size: int | None = None, extra_points=()):
        if truncation < 1:
            raise ValueError("truncation must be >= 1")
        self.truncation = truncation
        if grid_size is None:
            grid_size = 4 * truncation + 2
        if grid_size < truncation + 2:
            raise ValueError("grid too coarse for the requested truncation")
        self.grid_size = grid_size
        self.ctx = FloatContext()
        m_full = 2 * (grid_size - 1)
        pts = [(j / m_full, 1.0 / m_full if j in (0, grid_size - 1) else 2.0 / m_full)
               for j in range(grid_size)]
        base = {t for t, _ in pts}
        for t in extra_points:
            t = float(t)
            if not 0.0 <= t <= 0.5:
                raise ValueError(f"circle point {t} outside [0, 1/2]")
            if t not in base:
                pts.append((t, 0.0))  # zero weight: quadrature unchanged
        pts.sort()
        self.grid = [t for t, _ in pts]
        self.weights = [w for _, w in pts]
        self.identity_index = self.grid.index(0.0)
        self.spectrum = list(range(truncation + 1))
        self._delta = [1.0 if k == 0 else 2.0 for k in self.spectrum]

    def char_value(self, gi, xi):
        return math.cos(2.0 * math.pi * self.spectrum[gi] * self.grid[xi])

    def value_by_degree(self, k, xi):
        """cos(2 pi k t) for arbitrary degree k, beyond the truncation."""
        return math.cos(2.0 * math.pi * k * self.grid[xi])

    def multiplicity(self, gi):
        return self._delta[gi]

    def point_label(self, xi):
        return f"t={self.grid[xi]!r}"

    def describe(self):
        return f"circle pair, truncation {self.truncation}, {len(self.grid)} samples"


def gauss_gegenbauer(dim: int, size: int):
    """Nodes and weights for integral of f(u) (1-u^2)^((dim-2)/2) du on [-1,1].

    Golub-Welsch on the monic ultraspherical recurrence; weights normalized to
    sum 1.  Exact (to rounding) for polynomials of degree <= 2*size - 1, which
    is what makes the discrete sphere analysis self-consistent in any
    dimension, including odd ones where the density is not a polynomial.
    """
    k = np.arange(1, size)
    sub = np.sqrt(k * (k + dim - 2.0) / ((2 * k + dim - 1.0) * (2 * k + dim - 3.0)))
    jac = np.diag(sub, -1) + np.diag(sub, 1)
    nodes, vecs = np.linalg.eigh(jac)
    weights = vecs[0] ** 2
    weights /= weights.sum()
    return nodes, weights


def gegenbauer_table(dim: int, max_degree: int, u: np.ndarray) -> np.ndarray:
    """Normalized Gegenbauer values R_n(u), R_n(1) = 1, for n = 0..max_degree.

    Three-term recurrence for the sphere S^dim:
    R_{n+1} = (2(n + lam) u R_n - n R_{n-1}) / (n + 2 lam),  lam = (dim-1)/2.
    """
    lam = (dim - 1) / 2.0
    out = np.empty((max_degree + 1, len(u)))
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = u
    for n in range(1, max_degree):
        out[n + 1] = (2.0 * (n + lam) * u * out[n] - n * out[n - 1]) / (n + 2.0 * lam)
    return out


class SpherePair:
    """Unit sphere S^d with rotations fixing a pole; grid of angles t in [0, pi]."""

    kind = "sphere"
    continuous = True

    def __init__(self, dimension: int, truncation: int, grid_size: int | None = None,
                 extra_points=()):
        if dimension < 2:
            raise ValueError("sphere dimension must be >= 2")
        if truncation < 1:
            raise ValueError("truncation must be >= 1")
        self.dimension = dimension
        self.truncation = truncation
        if grid_size is None:
            grid_size = max(4 * truncation + 2, 64)
        if grid_size < truncation + 1:
            raise ValueError("grid too coarse for the requested truncation")
        self.grid_size = grid_size
        self.ctx = FloatContext()

        nodes, w = gauss_gegenbauer(dimension, grid_size)
        angles = np.arccos(nodes)  # descending u -> ascending t
        order = np.argsort(angles)
        pts = list(zip(angles[order].tolist(), w[order].tolist()))
        have = {round(t, 15) for t, _ in pts}
        forced = [0.0, math.pi] + [float(t) for t in extra_points]
        for t in forced:
            if not 0.0 <= t <= math.pi + 1e-12:
                raise ValueError(f"sphere angle {t} outside [0, pi]")
            t = min(t, math.pi)
            if round(t, 15) not in have:
                pts.append((t, 0.0))
                have.add(round(t, 15))
        pts.sort()
        self.grid = [t for t, _ in pts]
        self.weights = [w for _, w in pts]
        self.identity_index = self.grid.index(0.0)

        u = np.cos(np.array(self.grid))
        self._table = gegenbauer_table(dimension, truncation, u)
        self.spectrum = list(range(truncation + 1))
        # dimension weights from the grid quadrature itself, so that discrete
        # analysis/synthesis is self-consistent at this resolution
        wa = np.array(self.weights)
        self._delta = [float(1.0 / (wa * self._table[n] ** 2).sum())
                       for n in self.spectrum]

    def char_value(self, gi, xi):
        return float(self._table[self.spectrum[gi], xi])

    def value_by_degree(self, k, xi):
        if k <= self.truncation:
            return float(self._table[k, xi])
        u = np.array([math.cos(self.grid[xi])])
        return float(gegenbauer_table(self.dimension, k, u)[k, 0])

    def multiplicity(self, gi):
        return self._delta[gi]

    def harmonic_dimension(self, n: int) -> int:
        """Closed-form dimension of the degree-n harmonics on S^d."""
        d = self.dimension
        high = math.comb(n + d, d)
        low = math.comb(n + d - 2, d) if n >= 2 else 0
        return high - low

    def point_label(self, xi):
        return f"t={self.grid[xi]!r}"

    def describe(self):
        return (f"sphere pair S^{self.dimension}, truncation {self.truncation}, "
                f"{len(self.grid)} samples")


# ---------------------------------------------------------------------------
# shared harmonic analysis
# ---------------------------------------------------------------------------


def synthesis(structure, coeffs):
    """Grid values of sum_gamma delta(gamma) f(gamma) gamma(x)."""
    if len(coeffs) != len(structure.spectrum):
        raise ValueError("coefficient vector does not match the spectrum")
    ctx = structure.ctx
    out = []
    terms = [
        (gi, structure.multiplicity(gi) * ctx.coerce(c))
        for gi, c in enumerate(coeffs)
        if not ctx.is_zero(ctx.coerce(c))
    ]
    for xi in range(len(structure.grid)):
        acc = ctx.zero
        for gi, dc in terms:
            acc = acc + dc * structure.char_value(gi, xi)
        out.append(acc)
    return out


def analysis(structure, values):
    """Spectral coefficients f(gamma) = sum_x weight(x) phi(x) gamma(x)."""
    if len(values) != len(structure.grid):
        raise ValueError("value vector does not match the grid")
    ctx = structure.ctx
    pairs = [
        (xi, w * ctx.coerce(v))
        for xi, (w, v) in enumerate(zip(structure.weights, values))
        if not ctx.is_zero(w * ctx.coerce(v))
    ]
    out = []
    for gi in range(len(structure.spectrum)):
        acc = ctx.zero
        for xi, wv in pairs:
            acc = acc + wv * structure.char_value(gi, xi)
        out.append(acc)
    return out


def multiplicities(structure):
    return [structure.multiplicity(gi) for gi in range(len(structure.spectrum))]


def integrate(structure, values):
    """Invariant-measure integral of a grid function."""
    ctx = structure.ctx
    acc = ctx.zero
    for w, v in zip(structure.weights, values):
        acc = acc + w * ctx.coerce(v)
    return acc


def symmetrise(structure, raw):
    """Average a function on the underlying group over reflection classes.

    For FiniteAbelian the reflection subgroup is trivial and the input is
    returned unchanged (it must already live on the grid).  For DihedralPair
    the input is a function on Z_n and the result lives on the class grid.
    The group integral is preserved exactly.
    """
    ctx = structure.ctx
    if isinstance(structure, FiniteAbelian):
        if len(raw) != len(structure.grid):
            raise ValueError("value vector does not match the group")
        return [ctx.coerce(v) for v in raw]
    if isinstance(structure, DihedralPair):
        n = structure.order
        if len(raw) != n:
            raise ValueError(f"expected a function on {n} rotations")
        two = ctx.coerce(2)
        return [
            (ctx.coerce(raw[x]) + ctx.coerce(raw[(-x) % n])) / two
            for x in structure.grid
        ]
    raise TypeError(f"symmetrisation is not defined for {structure.kind!r}")


def build_structure(kind: str, *, moduli=None, order=None, dimension=None,
                    truncation=None, grid_size=None, extra_points=(),
                    arith: str = "exact"):
    """Construct a structure from config-level parameters."""
    if kind == "cyclic":
        if order is None:
            raise ValueError("cyclic structure needs an order")
        kind, moduli = "finite_abelian", [order]
    if kind == "finite_abelian":
        if not moduli:
            raise ValueError("finite_abelian structure needs moduli")
        ctx = FloatContext() if arith == "float" else None
        return FiniteAbelian(moduli, ctx=ctx)
    if kind == "dihedral":
        if order is None:
            raise ValueError("dihedral structure needs an order")
        ctx = FloatContext() if arith == "float" else None
        return DihedralPair(order, ctx=ctx)
    if kind == "circle":
        if truncation is None:
            raise ValueError("circle structure needs a truncation")
        return CirclePair(truncation, grid_size, extra_points=extra_points)
    if kind == "sphere":
        if dimension is None or truncation is None:
            raise ValueError("sphere structure needs dimension and truncation")
        return SpherePair(dimension, truncation, grid_size, extra_points=extra_points)
    raise ValueError(f"unknown structure kind {kind!r}")
