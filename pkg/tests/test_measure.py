"""Measure construction, fractional integrals, truncation, weak distance."""

import math

import numpy as np
import pytest
from scipy import integrate

from heavyqf.errors import DivergentIntegral, DivergentMoment, InvalidAlpha
from heavyqf.measure import (
    FractionalIntegrals,
    Measure,
    complex_frac_integral,
    frac_integrals,
    mean_and_power_moments,
    truncate,
    weak_distance,
)


class TestConstruction:
    def test_two_point_atoms(self):
        nu = Measure.two_point(0.5, 0.0, 1.0)
        assert nu.atoms == ((0.0, 0.5), (1.0, 0.5))
        assert nu.support() == (0.0, 1.0)
        assert not nu.is_degenerate()

    def test_point_mass_degenerate(self):
        nu = Measure.point_mass(3.0)
        assert nu.is_degenerate()
        assert nu.atom_weight(3.0) == 1.0

    def test_unsorted_atoms_rejected(self):
        with pytest.raises(ValueError):
            Measure(kind="discrete", atoms=((1.0, 0.5), (0.0, 0.5)))

    def test_mass_must_be_one(self):
        with pytest.raises(ValueError):
            Measure(kind="discrete", atoms=((0.0, 0.4), (1.0, 0.4)))

    def test_named_family_masses(self):
        for nu in (Measure.uniform_unit(), Measure.exponential(1.0), Measure.pareto(1.0)):
            hi = nu.support()[1]
            probe = hi + 1.0 if math.isfinite(hi) else math.inf
            assert nu.cdf(probe) == pytest.approx(1.0, abs=1e-10)

    def test_cdf_roundtrip_quantile(self):
        for nu in (Measure.uniform_unit(), Measure.exponential(2.0), Measure.pareto(1.5)):
            qs = np.array([0.05, 0.3, 0.5, 0.9, 0.99])
            xs = nu.quantile(qs)
            np.testing.assert_allclose(nu.cdf(xs), qs, atol=1e-9)

    def test_json_roundtrip(self):
        measures = [
            Measure.two_point(0.25, -1.0, 2.0),
            Measure.point_mass(0.5),
            Measure.uniform_unit(),
            Measure.exponential(3.0),
            Measure.pareto(2.5),
            Measure.discrete([(0.0, 0.2), (0.5, 0.3), (2.0, 0.5)]),
        ]
        for nu in measures:
            back = Measure.from_json(nu.to_json())
            assert back.atoms == nu.atoms
            assert back.family == nu.family


class TestFracIntegrals:
    def test_two_point_midpoint(self):
        # direct two-term sum: 1/2 * 0.5^(1/2) each side, 1/2 * 0.5^(-1/2) for dm1
        fi = frac_integrals(Measure.two_point(0.5, 0.0, 1.0), 1.0, 0.5)
        assert fi.a_plus == pytest.approx(0.5 * math.sqrt(0.5), abs=1e-15)
        assert fi.b_minus == pytest.approx(0.5 * math.sqrt(0.5), abs=1e-15)
        assert fi.a_plus_dm1 == pytest.approx(0.5 / math.sqrt(0.5), abs=1e-15)
        assert fi.b_minus_dm1 == pytest.approx(0.5 / math.sqrt(0.5), abs=1e-15)

    def test_point_mass_at_atom(self):
        fi = frac_integrals(Measure.point_mass(2.0), 0.7, 2.0)
        assert fi.a_plus == 0.0
        assert fi.b_minus == 0.0
        assert math.isinf(fi.a_plus_dm1)
        assert math.isinf(fi.b_minus_dm1)

    def test_uniform_closed_form_at_one(self):
        # antiderivative oracle: ∫_0^1 (1-y)^(1/2) dy = 2/3, ∫_0^1 (1-y)^(-1/2) dy = 2
        fi = frac_integrals(Measure.uniform_unit(), 1.0, 1.0)
        assert fi.a_plus == pytest.approx(2.0 / 3.0, abs=1e-10)
        assert fi.b_minus == 0.0
        assert fi.a_plus_dm1 == pytest.approx(2.0, abs=1e-9)
        assert fi.b_minus_dm1 == 0.0

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0, 1.5, 1.75])
    @pytest.mark.parametrize("x", [0.2, 0.5, 0.85])
    def test_uniform_antiderivative_oracle(self, alpha, x):
        # ∫_0^x (x-y)^q dy = x^(q+1)/(q+1) for q > -1
        q = alpha / 2.0
        fi = frac_integrals(Measure.uniform_unit(), alpha, x)
        assert fi.a_plus == pytest.approx(x ** (q + 1) / (q + 1), rel=1e-9)
        assert fi.b_minus == pytest.approx((1 - x) ** (q + 1) / (q + 1), rel=1e-9)
        assert fi.a_plus_dm1 == pytest.approx(x**q / q, rel=1e-9)
        assert fi.b_minus_dm1 == pytest.approx((1 - x) ** q / q, rel=1e-9)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.6])
    def test_exponential_gamma_oracle(self, alpha):
        # ∫ (x-y)_-^q e^-y dy = e^-x Γ(1+q) for x >= 0 (both exponents)
        from scipy.special import gamma

        nu = Measure.exponential(1.0)
        for x in (0.5, 3.0):
            fi = frac_integrals(nu, alpha, x)
            q = alpha / 2.0
            assert fi.b_minus == pytest.approx(math.exp(-x) * gamma(1 + q), rel=1e-9)
            assert fi.b_minus_dm1 == pytest.approx(math.exp(-x) * gamma(q), rel=1e-9)

    @pytest.mark.parametrize("alpha,s", [(1.0, 1.0), (0.5, 0.8), (1.5, 2.5)])
    def test_pareto_beta_oracle(self, alpha, s):
        # ∫ (x-y)_-^q s y^{-s-1} dy = s x^(q-s) B(q+1, s-q) for x >= 1
        from scipy.special import beta

        nu = Measure.pareto(s)
        q = alpha / 2.0
        for x in (1.5, 4.0, 40.0):
            fi = frac_integrals(nu, alpha, x)
            assert fi.b_minus == pytest.approx(s * x ** (q - s) * beta(q + 1, s - q), rel=1e-8)
            qm = q - 1.0
            assert fi.b_minus_dm1 == pytest.approx(
                s * x ** (qm - s) * beta(qm + 1, s - qm), rel=1e-8
            )

    def test_pareto_divergent(self):
        with pytest.raises(DivergentIntegral):
            frac_integrals(Measure.pareto(0.4), 1.0, 3.0)

    def test_invalid_alpha(self):
        nu = Measure.uniform_unit()
        for alpha in (0.0, 2.0, -1.0, 2.5):
            with pytest.raises(InvalidAlpha):
                frac_integrals(nu, alpha, 0.5)

    def test_above_support_matches_abs_moment(self):
        # a_plus at x above sup supp equals E[(x-Y)^(alpha/2)], direct quadrature oracle
        nu = Measure.uniform_unit()
        alpha, x = 1.2, 1.7
        fi = frac_integrals(nu, alpha, x)
        oracle = integrate.quad(lambda y: (x - y) ** (alpha / 2), 0.0, 1.0)[0]
        assert fi.b_minus == 0.0
        assert fi.a_plus == pytest.approx(oracle, abs=1e-8)

    def test_substitution_matches_naive_excised_quadrature(self):
        # naive adaptive quadrature with singularity excision of width 1e-6
        nu = Measure.uniform_unit()
        for alpha, x in [(0.5, 0.3), (1.0, 0.5), (1.5, 0.75)]:
            q = alpha / 2.0 - 1.0
            fi = frac_integrals(nu, alpha, x)
            naive_plus = integrate.quad(
                lambda y: (x - y) ** q, 0.0, x - 1e-6, limit=200
            )[0] + (1e-6) ** (q + 1) / (q + 1)
            assert fi.a_plus_dm1 == pytest.approx(naive_plus, rel=1e-6)

    def test_monotone_under_restriction(self):
        # integrals over a truncated measure never exceed the full-measure value
        nu = Measure.pareto(1.0)
        nut = truncate(nu, 5.0)
        for alpha in (0.5, 1.0):
            for x in (2.0, 3.5):
                full = frac_integrals(nu, alpha, x)
                part = frac_integrals(nut, alpha, x)
                # the atom relocated to 0 contributes to a_plus, so compare b side
                assert part.b_minus <= full.b_minus + 1e-12
                assert part.b_minus_dm1 <= full.b_minus_dm1 + 1e-12


class TestComplexIntegral:
    def test_atom_sum(self):
        nu = Measure.two_point(0.5, 0.0, 1.0)
        z = complex(-1.0, 0.0)
        # principal branch: (-1)^(1/2) = i, (-2)^(1/2) = sqrt(2) i
        val = complex_frac_integral(nu, 0.5, z)
        expect = 0.5 * (1j) + 0.5 * (math.sqrt(2.0) * 1j)
        assert val == pytest.approx(expect, abs=1e-14)

    def test_density_against_real_quadrature(self):
        nu = Measure.uniform_unit()
        z = complex(0.4, 0.3)
        for q in (0.6, -0.4):
            val = complex_frac_integral(nu, q, z)
            re = integrate.quad(lambda y: ((z - y) ** q).real, 0, 1, limit=200)[0]
            im = integrate.quad(lambda y: ((z - y) ** q).imag, 0, 1, limit=200)[0]
            assert val == pytest.approx(complex(re, im), abs=1e-9)

    def test_pareto_tail_against_segmented_quadrature(self):
        nu = Measure.pareto(1.2)
        z = complex(2.0, 1.0)
        q = 0.5
        val = complex_frac_integral(nu, q, z)
        f = lambda y: np.exp(q * np.log(z - y)) * 1.2 * y ** (-2.2)
        edges = np.r_[1.0, np.geomspace(2.0, 1e12, 60)]
        re = sum(
            integrate.quad(lambda y: f(y).real, a, b, limit=200)[0]
            for a, b in zip(edges[:-1], edges[1:])
        )
        im = sum(
            integrate.quad(lambda y: f(y).imag, a, b, limit=200)[0]
            for a, b in zip(edges[:-1], edges[1:])
        )
        assert val == pytest.approx(complex(re, im), abs=1e-7)


class TestTruncate:
    def test_inside_support_unchanged(self):
        nu = Measure.two_point(0.5, 0.0, 1.0)
        assert truncate(nu, 2.0) is nu

    def test_pareto_half_mass(self):
        # ∫_2^∞ y^-2 dy = 1/2 relocated to an atom at 0
        nut = truncate(Measure.pareto(1.0), 2.0)
        assert nut.kind == "mixed"
        assert nut.atom_weight(0.0) == pytest.approx(0.5, abs=1e-12)
        piece = nut.pieces[0]
        assert (piece.lo, piece.hi) == (1.0, 2.0)
        assert piece.mass() == pytest.approx(0.5, abs=1e-12)

    def test_point_mass_relocated(self):
        nut = truncate(Measure.point_mass(3.0), 1.0)
        assert nut.atoms == ((0.0, 1.0),)

    def test_weak_convergence_monotone(self):
        nu = Measure.pareto(1.0)
        dists = [weak_distance(truncate(nu, T), nu) for T in (2.0, 5.0, 20.0, 100.0)]
        assert all(d2 <= d1 + 1e-9 for d1, d2 in zip(dists, dists[1:]))
        assert dists[-1] < dists[0]


class TestMoments:
    def test_two_point(self):
        assert mean_and_power_moments(Measure.two_point(0.5, 0.0, 1.0), 2) == [0.5, 0.5]

    def test_uniform(self):
        moments = mean_and_power_moments(Measure.uniform_unit(), 3)
        np.testing.assert_allclose(moments, [1 / 2, 1 / 3, 1 / 4], atol=1e-10)

    def test_exponential(self):
        moments = mean_and_power_moments(Measure.exponential(1.0), 2)
        np.testing.assert_allclose(moments, [1.0, 2.0], atol=1e-9)

    def test_pareto_divergent(self):
        with pytest.raises(DivergentMoment):
            mean_and_power_moments(Measure.pareto(1.5), 2)


class TestWeakDistance:
    def test_identical(self):
        nu = Measure.two_point(0.5, 0.0, 1.0)
        assert weak_distance(nu, nu) == 0.0
        u = Measure.uniform_unit()
        assert weak_distance(u, u) == 0.0

    def test_unit_shifted_diracs(self):
        d = weak_distance(Measure.point_mass(0.0), Measure.point_mass(1.0))
        assert 0.45 < d <= 0.55

    def test_small_shift_scales(self):
        d1 = weak_distance(Measure.point_mass(0.0), Measure.point_mass(0.1))
        d2 = weak_distance(Measure.point_mass(0.0), Measure.point_mass(0.3))
        assert 0.0 < d1 < d2
