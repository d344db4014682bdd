"""Structure and harmonic-analysis tests.

Dimension weights are checked against an independent quadrature oracle
(1 / sum_x w(x) gamma(x)^2) and, for spheres, against the closed-form
harmonic dimensions.
"""

import math
import random
from fractions import Fraction

import pytest

from delsarte.scalars import rational
from delsarte.spectra import (
    CirclePair,
    DihedralPair,
    FiniteAbelian,
    SpherePair,
    analysis,
    build_structure,
    integrate,
    multiplicities,
    symmetrise,
    synthesis,
)


def quadrature_delta_oracle(structure, gi):
    ctx = structure.ctx
    acc = ctx.zero
    for xi, w in enumerate(structure.weights):
        g = structure.char_value(gi, xi)
        acc = acc + w * g * g
    return ctx.one / acc


# ---------------------------------------------------------------------------
# finite abelian
# ---------------------------------------------------------------------------


def test_z6_dimension_weights():
    st = FiniteAbelian([6])
    assert [int(d) for d in multiplicities(st)] == [1, 2, 2, 1]
    for gi in range(len(st.spectrum)):
        assert st.multiplicity(gi) == quadrature_delta_oracle(st, gi)


def test_weights_sum_to_one_and_identity_delta():
    for st in [
        FiniteAbelian([5]),
        FiniteAbelian([2, 3]),
        DihedralPair(7),
        CirclePair(6),
        SpherePair(2, 8),
    ]:
        total = integrate(st, [st.ctx.one] * len(st.grid))
        assert st.ctx.is_zero(total - st.ctx.one) or abs(float(total) - 1) < 1e-12
        assert float(st.multiplicity(0)) == pytest.approx(1.0, abs=1e-12)
        assert st.grid[st.identity_index] == st.grid[0] or True
        # identity evaluates to 1 for every spherical function
        for gi in range(len(st.spectrum)):
            v = st.char_value(gi, st.identity_index)
            assert abs(float(v) - 1.0) < 1e-12


def test_character_values_bounded_by_one():
    for st in [FiniteAbelian([7]), DihedralPair(9), SpherePair(3, 6)]:
        for gi in range(len(st.spectrum)):
            for xi in range(len(st.grid)):
                assert float(st.char_value(gi, xi)) <= 1.0 + 1e-12


def test_z4_synthesis_indicator():
    st = FiniteAbelian([4])
    f = [rational(1, 4), rational(1, 4), rational(1, 4)]
    phi = synthesis(st, f)
    want = [rational(1), rational(0), rational(0), rational(0)]
    assert all(st.ctx.is_zero(a - b) for a, b in zip(phi, want))
    back = analysis(st, phi)
    assert all(st.ctx.is_zero(a - b) for a, b in zip(back, f))


def test_unit_mass_at_trivial_character():
    st = FiniteAbelian([2, 3])
    f = [st.ctx.one] + [st.ctx.zero] * (len(st.spectrum) - 1)
    assert all(st.ctx.is_zero(v - st.ctx.one) for v in synthesis(st, f))
    coeffs = analysis(st, [st.ctx.one] * len(st.grid))
    assert st.ctx.is_zero(coeffs[0] - st.ctx.one)
    assert all(st.ctx.is_zero(c) for c in coeffs[1:])


@pytest.mark.parametrize(
    "make",
    [
        lambda: FiniteAbelian([6]),
        lambda: FiniteAbelian([5]),
        lambda: FiniteAbelian([7]),
        lambda: FiniteAbelian([2, 4]),
        lambda: DihedralPair(6),
        lambda: DihedralPair(13),
    ],
)
def test_roundtrip_exact_random_rational(make):
    st = make()
    rng = random.Random(1234)
    for _ in range(20):
        f = [
            st.ctx.coerce(Fraction(rng.randint(-30, 30), rng.randint(1, 9)))
            for _ in st.spectrum
        ]
        assert all(
            st.ctx.is_zero(a - b) for a, b in zip(analysis(st, synthesis(st, f)), f)
        )


def test_discrete_orthonormality_exact():
    for st in [FiniteAbelian([8]), FiniteAbelian([2, 3]), DihedralPair(10)]:
        ctx = st.ctx
        for gi in range(len(st.spectrum)):
            for gj in range(gi, len(st.spectrum)):
                acc = ctx.zero
                for xi, w in enumerate(st.weights):
                    acc = acc + w * st.multiplicity(gi) * st.char_value(
                        gi, xi
                    ) * st.char_value(gj, xi)
                want = ctx.one if gi == gj else ctx.zero
                assert ctx.is_zero(acc - want)


def test_positivity_transfer_and_uniform_bound():
    st = FiniteAbelian([9])
    rng = random.Random(5)
    for _ in range(10):
        f = [st.ctx.coerce(Fraction(rng.randint(0, 8), 3)) for _ in st.spectrum]
        phi = synthesis(st, f)
        peak = phi[st.identity_index]
        bound = st.ctx.zero
        for gi, c in enumerate(f):
            bound = bound + st.multiplicity(gi) * c
        for v in phi:
            assert st.ctx.sign(peak - v) >= 0
            assert st.ctx.sign(bound - v) >= 0


# ---------------------------------------------------------------------------
# dihedral
# ---------------------------------------------------------------------------


def test_dihedral_evaluation_closed_form():
    st = DihedralPair(6)
    # k=2 at class of 1: cos(2*pi*2/6) = -1/2
    gi = st.spectrum.index(2)
    xi = st.grid.index(1)
    assert st.char_value(gi, xi) == rational(-1, 2)


def test_dihedral_weights():
    st = DihedralPair(6)
    assert st.weights == [
        rational(1, 6),
        rational(2, 6),
        rational(2, 6),
        rational(1, 6),
    ]
    assert [int(d) for d in multiplicities(st)] == [1, 2, 2, 1]


def test_symmetrise_point_mass():
    st = DihedralPair(6)
    raw = [0, 1, 0, 0, 0, 0]
    folded = symmetrise(st, raw)
    assert folded == [rational(0), rational(1, 2), rational(0), rational(0)]


def test_symmetrise_preserves_integral():
    st = DihedralPair(7)
    rng = random.Random(99)
    for _ in range(20):
        raw = [Fraction(rng.randint(-12, 12), rng.randint(1, 5)) for _ in range(7)]
        folded = symmetrise(st, raw)
        lhs = integrate(st, folded)
        rhs = sum((st.ctx.coerce(v) for v in raw), st.ctx.zero) / st.ctx.coerce(7)
        assert st.ctx.is_zero(lhs - rhs)


def test_symmetrise_finite_abelian_is_identity():
    st = FiniteAbelian([5])
    raw = [1, 2, 3, 4, 5]
    assert symmetrise(st, raw) == [st.ctx.coerce(v) for v in raw]


def test_symmetrise_rejects_continuous():
    with pytest.raises(TypeError):
        symmetrise(CirclePair(4), [0.0] * len(CirclePair(4).grid))


# ---------------------------------------------------------------------------
# circle and sphere
# ---------------------------------------------------------------------------


def test_circle_orthogonality_discrete():
    st = CirclePair(10)
    for gi in range(len(st.spectrum)):
        for gj in range(gi, len(st.spectrum)):
            acc = sum(
                w * st.multiplicity(gi) * st.char_value(gi, xi) * st.char_value(gj, xi)
                for xi, w in enumerate(st.weights)
            )
            assert acc == pytest.approx(1.0 if gi == gj else 0.0, abs=1e-12)


def test_sphere_legendre_value():
    st = SpherePair(2, 5, extra_points=[math.pi / 3])
    xi = st.grid.index(math.pi / 3)
    gi = st.spectrum.index(1)
    assert st.char_value(gi, xi) == pytest.approx(0.5, abs=1e-14)


def test_sphere_dimension_weights_match_harmonic_dimensions():
    for d in [2, 3, 5]:
        st = SpherePair(d, 6)
        for n in range(7):
            gi = st.spectrum.index(n)
            assert st.multiplicity(gi) == pytest.approx(
                st.harmonic_dimension(n), rel=1e-11
            )
    st2 = SpherePair(2, 4)
    assert [round(st2.multiplicity(i)) for i in range(3)] == [1, 3, 5]
    assert [st2.harmonic_dimension(n) for n in range(4)] == [1, 3, 5, 7]


def test_sphere_roundtrip_float():
    st = SpherePair(3, 8)
    rng = random.Random(7)
    f = [rng.uniform(-1, 1) for _ in st.spectrum]
    back = analysis(st, synthesis(st, f))
    assert all(abs(a - b) < 1e-10 for a, b in zip(back, f))


def test_quadrature_consistency_under_refinement():
    # analysis of a fixed low-degree function changes negligibly when the
    # grid is doubled
    for make, degree in [
        (lambda gs: CirclePair(6, gs), 4),
        (lambda gs: SpherePair(2, 6, gs), 4),
    ]:
        coarse = make(80)
        fine = make(160)
        f = [0.0] * 7
        f[degree] = 1.0
        a = analysis(coarse, synthesis(coarse, f))
        b = analysis(fine, synthesis(fine, f))
        assert all(abs(x - y) < 1e-10 for x, y in zip(a, b))


def test_extended_degree_evaluation():
    st = CirclePair(4, extra_points=[0.125])
    xi = st.grid.index(0.125)
    assert st.value_by_degree(10, xi) == pytest.approx(
        math.cos(2 * math.pi * 10 * 0.125), abs=1e-14
    )
    sp = SpherePair(2, 3)
    xi = 5
    # degree beyond truncation agrees with a fresh recurrence
    u = math.cos(sp.grid[xi])
    p4 = (35 * u**4 - 30 * u**2 + 3) / 8.0
    assert sp.value_by_degree(4, xi) == pytest.approx(p4, abs=1e-12)


# ---------------------------------------------------------------------------
# construction helper
# ---------------------------------------------------------------------------


def test_build_structure_dispatch():
    assert build_structure("cyclic", order=6).kind == "finite_abelian"
    assert build_structure("finite_abelian", moduli=[2, 2]).kind == "finite_abelian"
    assert build_structure("dihedral", order=5).kind == "dihedral"
    assert build_structure("circle", truncation=4).kind == "circle"
    assert build_structure("sphere", dimension=2, truncation=4).kind == "sphere"
    with pytest.raises(ValueError):
        build_structure("torus")
    with pytest.raises(ValueError):
        build_structure("cyclic")


def test_build_structure_float_mode():
    st = build_structure("cyclic", order=7, arith="float")
    assert st.ctx.exact is False
    assert st.char_value(1, 1) == pytest.approx(math.cos(2 * math.pi / 7))
