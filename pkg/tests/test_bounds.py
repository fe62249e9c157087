import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate, special

from wksbounds import bounds
from wksbounds.bounds import SamplingScheme, Z_FLOOR
from wksbounds.exceptions import DomainError, ValidityError
from wksbounds.orlicz import GAUSSIAN, OrliczFunction, PowerOrlicz
from wksbounds.planner import Schedule
from wksbounds.spectral import MaternHalfModel, NormalizedTailModel, SpectralModel

SI_PI = float(special.sici(math.pi)[0])
MATERN = MaternHalfModel(1.0)


class Bandlimited(SpectralModel):
    """Hypothetical model with no spectral mass above any band edge."""

    def __init__(self, b0=1.0):
        self.b0 = b0

    def variance(self):
        return self.b0

    def tail_mass(self, Lambda):
        return 0.0


def stage(N):
    return Schedule().scheme(N)


class TestScheme:
    def test_times_and_spacing(self):
        s = SamplingScheme(4.0, 2, 3.0)
        np.testing.assert_allclose(s.sample_times(), np.arange(-2, 3) * math.pi / 4)
        assert s.spacing == pytest.approx(math.pi / 4)

    @pytest.mark.parametrize("omega,n,lam", [(0.0, 2, 0.1), (4.0, 0, 3.0), (4.0, 2.5, 3.0),
                                             (4.0, 2, 4.0), (4.0, 2, 0.0)])
    def test_invalid(self, omega, n, lam):
        with pytest.raises(DomainError):
            SamplingScheme(omega, n, lam)


class TestSiPi:
    def test_constant(self):
        assert abs(bounds.si_pi() - 1.8519) < 5e-5
        assert bounds.si_pi() == pytest.approx(SI_PI, rel=1e-14)
        # mpmath, 40 digits
        assert bounds.si_pi() == pytest.approx(1.8519370519824662, rel=1e-14)


class TestCn:
    def test_t_zero(self):
        s = SamplingScheme(4.0, 10, 3.0)
        expected = (4 * (0.5 + 1 + 0.1) / (math.pi * 0.25 * 0.25)) ** 2
        got = bounds.c_n(0.0, s, NormalizedTailModel(), 0.5)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(1062.4296145894797, rel=1e-14)

    def test_uniform_args(self):
        s = SamplingScheme(16.0, 256, 12.0)
        zs = bounds.z_star(1.0, s)
        assert zs == pytest.approx(3.957858736028819e-4, rel=1e-14)
        assert bounds.c_n(1.0, s, NormalizedTailModel(), zs) == pytest.approx(134.70022768220229, rel=1e-12)

    def test_variance_scaling(self):
        s = SamplingScheme(16.0, 256, 12.0)
        assert bounds.c_n(0.3, s, MATERN, 0.1) == pytest.approx(
            math.pi * bounds.c_n(0.3, s, NormalizedTailModel(), 0.1), rel=1e-14)

    def test_increasing_in_z(self):
        s = SamplingScheme(16.0, 256, 12.0)
        assert bounds.c_n(1.0, s, MATERN, 0.2) < bounds.c_n(1.0, s, MATERN, 0.4)

    @pytest.mark.parametrize("z", [0.0, 1.0, -0.1, 1.5])
    def test_bad_z(self, z):
        with pytest.raises(ValidityError):
            bounds.c_n(0.1, SamplingScheme(16.0, 256, 12.0), MATERN, z)

    def test_sample_size_precondition(self):
        s = SamplingScheme(16.0, 4, 12.0)
        # omega*t/pi = 16/pi ~ 5.09 > n*sqrt(z) = 4*0.7
        with pytest.raises(ValidityError, match="n >= omega"):
            bounds.c_n(1.0, s, MATERN, 0.49)

    def test_negative_t(self):
        with pytest.raises(DomainError):
            bounds.c_n(-0.1, SamplingScheme(16.0, 256, 12.0), MATERN, 0.5)


class TestDn:
    def test_zero_sine(self):
        for n in (2, 5, 50):
            # omega*t = pi exactly up to rounding of sin(pi)
            assert bounds.d_n(math.pi / 4, SamplingScheme(4.0, n, 3.0)) == pytest.approx(2.0, abs=1e-14)

    def test_quarter_period(self):
        s = SamplingScheme(4.0, 10, 3.0)
        t = math.pi / 8
        expected = 2 + (2 / math.pi) * (1 + SI_PI + 1 / 9.5)
        assert bounds.d_n(t, s) == pytest.approx(expected, rel=1e-14)
        assert bounds.d_n(t, s) == pytest.approx(3.8826121244573888, rel=1e-14)

    def test_limit(self):
        limit = 2 + (2 / math.pi) * (1 + SI_PI)
        assert limit == pytest.approx(3.8155995168397486, rel=1e-14)
        vals = [bounds.d_n(math.pi / 8, SamplingScheme(4.0, n, 3.0)) for n in (10, 100, 1000, 10 ** 6)]
        assert all(v > limit for v in vals)
        assert np.all(np.diff(vals) < 0)
        assert vals[-1] == pytest.approx(limit, rel=1e-6)

    def test_precondition(self):
        with pytest.raises(ValidityError):
            bounds.d_n(1.0, SamplingScheme(16.0, 5, 12.0))


class TestAn:
    def test_bandlimited_case(self):
        s = SamplingScheme(16.0, 256, 12.0)
        br = bounds.a_n(0.5, s, Bandlimited(), 0.1)
        assert br.tail == 0.0
        assert br.total == pytest.approx(math.sqrt(br.c_value) / 256, rel=1e-15)

    def test_matern_example(self):
        s = SamplingScheme(16.0, 256, 12.0)
        br = bounds.a_n_auto(0.5, s, MATERN)
        assert br.z_used == pytest.approx(9.894646840072048e-5, rel=1e-13)
        assert br.tail == pytest.approx(0.16628246377688246, rel=1e-13)
        assert br.total == pytest.approx(1.6089846186671272, rel=1e-12)
        comp = (math.sqrt(bounds.c_n(0.5, s, MATERN, br.z_used)) / 256
                + bounds.d_n(0.5, s) * math.sqrt(MATERN.tail_mass(12.0)))
        assert br.total == pytest.approx(comp, rel=1e-14)

    def test_doubling_n_changes_first_term_only(self):
        s1 = SamplingScheme(16.0, 256, 12.0)
        s2 = SamplingScheme(16.0, 512, 12.0)
        b1 = bounds.a_n(0.5, s1, MATERN, 0.01)
        b2 = bounds.a_n(0.5, s2, MATERN, 0.01)
        assert math.sqrt(b2.c_value) / 512 < math.sqrt(b1.c_value) / 256
        assert b2.tail == b1.tail
        assert b2.total < b1.total

    def test_error_names_inputs(self):
        with pytest.raises(ValidityError, match="z=0.0001"):
            bounds.a_n(1.0, SamplingScheme(16.0, 256, 12.0), MATERN, 1e-4)

    def test_auto_halfway(self):
        s = SamplingScheme(4.0, 10, 3.0)
        t = math.pi * 10 / (2 * 4.0)
        assert bounds.a_n_auto(t, s, MATERN).z_used == pytest.approx(0.25, rel=1e-14)

    def test_auto_at_zero(self):
        br = bounds.a_n_auto(0.0, stage(4), MATERN)
        assert br.z_used == Z_FLOOR
        assert math.isfinite(br.total)

    def test_auto_beats_larger_z(self):
        s = stage(4)
        rng = np.random.default_rng(11)
        for t in (0.1, 0.5, 1.0):
            best = bounds.a_n_auto(t, s, MATERN)
            for z in rng.uniform(best.z_used, 1.0, 10):
                assert best.total <= bounds.a_n(t, s, MATERN, z).total

    def test_no_admissible_z(self):
        with pytest.raises(ValidityError, match="no admissible z"):
            bounds.a_n_auto(2.0, SamplingScheme(16.0, 10, 12.0), MATERN)


def a_tilde_oracle(T, omega, n, lam, b0, q):
    zs = (omega * T / (math.pi * n)) ** 2
    c = b0 * (4 * omega * T / (math.pi ** 2 * (1 - zs))
              + 4 * (zs + 1 + 1 / n) / (math.pi * (1 - zs) ** 2 * (1 - lam / omega))) ** 2
    r = omega * T / math.pi
    d = 2 + (2 / math.pi) * (1 + SI_PI + (r + 0.5) / (n - r))
    return math.sqrt(c) / n + d * math.sqrt(q)


class TestATilde:
    def test_decreasing_schedule(self):
        vals = [bounds.a_tilde(1.0, stage(N), MATERN).total for N in range(3, 9)]
        assert np.all(np.diff(vals) < 0)
        np.testing.assert_allclose(
            vals, [2.41644, 1.64206, 1.14368, 0.80386, 0.56743, 0.40153], rtol=1e-5)

    def test_matches_oracle(self):
        for N in range(1, 12):
            s = stage(N)
            got = bounds.a_tilde(1.0, s, MATERN).total
            want = a_tilde_oracle(1.0, s.omega, s.n, s.lambda_band, math.pi,
                                  2 * math.atan(1 / s.lambda_band))
            assert got == pytest.approx(want, rel=1e-13)

    def test_closed_form_d(self):
        s = SamplingScheme(4.0, 2, 3.0)
        br = bounds.a_tilde(math.pi / 4, s, MATERN)
        assert br.z_used == pytest.approx(0.25, rel=1e-15)
        assert br.d_value == pytest.approx(2 + (2 / math.pi) * (1 + SI_PI + 1.5), rel=1e-14)
        assert br.d_value == pytest.approx(4.7705291753911206, rel=1e-14)

    def test_z_star_violation(self):
        with pytest.raises(ValidityError, match=r"z\* = ω²T²/\(π²n²\) ∈ \(0,1\) violated") as info:
            bounds.a_tilde(1.0, SamplingScheme(16.0, 1, 12.0), MATERN)
        assert "smallest admissible n is 6" in str(info.value)
        # and 6 indeed works while 5 does not
        bounds.a_tilde(1.0, SamplingScheme(16.0, 6, 12.0), MATERN)
        with pytest.raises(ValidityError):
            bounds.a_tilde(1.0, SamplingScheme(16.0, 5, 12.0), MATERN)

    def test_dominates_pointwise(self):
        for N in (3, 4, 5):
            s = stage(N)
            at = bounds.a_tilde(1.0, s, MATERN)
            for t in np.linspace(0, 1, 101):
                assert bounds.a_n(t, s, MATERN, at.z_used).total <= at.total * (1 + 1e-14)


class TestLp:
    def test_constant_integrand(self):
        # with a bandlimited model of tiny variance the bound is nearly flat; check the
        # scaling identities instead of a constant: c_x**p factor and p=1 linearity
        s = stage(4)
        i1 = bounds.s_np(s, MATERN, 1.0, 1.0, 1.0).value
        assert bounds.s_np(s, MATERN, 1.0, 1.0, 3.0).value == pytest.approx(3 * i1, rel=1e-12)
        assert bounds.s_np(s, MATERN, 1.0, 2.0, 3.0).value == pytest.approx(
            9 * bounds.s_np(s, MATERN, 1.0, 2.0).value, rel=1e-12)

    def test_value_and_domination(self):
        s = stage(4)
        res = bounds.s_np(s, MATERN, 1.0, 2.0)
        assert res.value == pytest.approx(1.84948, rel=1e-5)
        assert res.error < 1e-7 * res.value
        assert res.value <= bounds.s_np_upper(s, MATERN, 1.0, 2.0)

    def test_against_composite_simpson(self):
        s = stage(4)
        t = np.linspace(0.0, 1.0, 100_001)
        y = np.array([bounds.a_n_auto(x, s, MATERN).total ** 2 for x in t])
        brute = integrate.simpson(y, x=t)
        assert bounds.s_np(s, MATERN, 1.0, 2.0).value == pytest.approx(brute, rel=1e-6)

    def test_upper(self):
        s = stage(4)
        at = bounds.a_tilde(1.0, s, MATERN).total
        assert bounds.s_np_upper(s, MATERN, 1.0, 1.0) == pytest.approx(at, rel=1e-15)
        assert bounds.s_np_upper(s, MATERN, 1.0, 2.0) == pytest.approx(2.69636, rel=1e-5)
        s6 = stage(6)
        assert bounds.a_tilde(1.0, s6, MATERN).total < 1
        assert bounds.s_np_upper(s6, MATERN, 1.0, 4.0) < bounds.s_np_upper(s6, MATERN, 1.0, 2.0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            bounds.s_np(stage(4), MATERN, 1.0, 0.5)
        with pytest.raises(DomainError):
            bounds.s_np(stage(4), MATERN, 1.0, 2.0, 0.0)
        with pytest.raises(ValidityError):
            bounds.s_np(SamplingScheme(16.0, 4, 12.0), MATERN, 1.0, 2.0)


class TestThreshold:
    def test_examples(self):
        assert bounds.validity_threshold(1.0, 2.0, GAUSSIAN) == 2.0
        assert bounds.validity_threshold(1.0, 1.0, GAUSSIAN) == 1.0
        thr = bounds.validity_threshold(0.3, 2.0, PowerOrlicz(1.5))
        assert thr == pytest.approx(0.3 * 2 ** (2 / 3), rel=1e-14)
        assert thr == pytest.approx(0.47622031559045984, rel=1e-14)
        # substitution check: eps**alpha = S**alpha * p**((alpha-1)p)
        assert thr ** 1.5 == pytest.approx(0.3 ** 1.5 * 2 ** (0.5 * 2), rel=1e-13)

    @pytest.mark.parametrize("alpha", [1.25, 1.5, 1.75, 2.0])
    @pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
    def test_identity(self, alpha, p):
        f = PowerOrlicz(alpha)
        thr = bounds.validity_threshold(0.7, p, f)
        assert bounds.lp_condition_rhs(thr, 0.7, p, f) == pytest.approx(thr, rel=1e-9)

    def test_generic_family_by_bisection(self):
        class Wrapped(OrliczFunction):
            # same function as the power family but without the closed form
            def __init__(self, a):
                self.inner = PowerOrlicz(a)

            def phi(self, x):
                return self.inner.phi(x)

            def density(self, x):
                return self.inner.density(x)

        for a in (1.3, 2.0):
            got = bounds.validity_threshold(0.4, 2.5, Wrapped(a))
            assert got == pytest.approx(bounds.validity_threshold(0.4, 2.5, PowerOrlicz(a)), rel=1e-10)

    def test_invalid(self):
        with pytest.raises(DomainError):
            bounds.validity_threshold(0.0, 2.0, GAUSSIAN)


class TestTailProbability:
    def test_examples(self):
        assert bounds.tail_probability(4.0, 1.0, 2.0, GAUSSIAN) == pytest.approx(0.27067056647322538, rel=1e-14)
        assert bounds.tail_probability(9.0, 1.0, 2.0, PowerOrlicz(1.5)) == pytest.approx(2.468196081733591e-4, rel=1e-13)

    def test_monotone_to_zero(self):
        eps = np.geomspace(2.5, 1e3, 40)
        vals = [bounds.tail_probability(e, 1.0, 2.0, GAUSSIAN) for e in eps]
        assert np.all(np.diff(vals) < 0)
        assert vals[-1] < 1e-200
        assert bounds.tail_probability(1e5, 1.0, 2.0, GAUSSIAN) == 0.0

    def test_raw_value_can_exceed_one(self):
        # threshold is 2**(2/3) ~ 1.587 and phi*(sqrt(1.6)) = 1.6**1.5/3 < ln 2
        assert bounds.tail_probability(1.6, 1.0, 2.0, PowerOrlicz(1.5)) == pytest.approx(
            2 * math.exp(-1.6 ** 1.5 / 3), rel=1e-14)
        assert bounds.tail_probability(1.6, 1.0, 2.0, PowerOrlicz(1.5)) > 1.0

    def test_at_threshold(self):
        with pytest.raises(ValidityError, match="eps > S"):
            bounds.tail_probability(2.0, 1.0, 2.0, GAUSSIAN)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(3, 6), t=st.floats(0.0, 1.0), frac=st.floats(0.0, 1.0))
def test_auto_z_is_optimal(N, t, frac):
    s = stage(N)
    best = bounds.a_n_auto(t, s, MATERN)
    z = best.z_used + frac * (1 - 1e-6 - best.z_used)
    assume(0 < z < 1)
    assert best.total <= bounds.a_n(t, s, MATERN, z).total * (1 + 1e-14)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(3, 8), t=st.floats(0.0, 1.0))
def test_uniform_dominates(N, t):
    s = stage(N)
    at = bounds.a_tilde(1.0, s, MATERN)
    assert bounds.a_n_auto(t, s, MATERN).total <= at.total * (1 + 1e-14)


@settings(max_examples=80, deadline=None)
@given(alpha=st.floats(1.05, 2.0), p=st.floats(1.0, 6.0), S=st.floats(1e-3, 1e3))
def test_threshold_identity_property(alpha, p, S):
    f = PowerOrlicz(alpha)
    thr = bounds.validity_threshold(S, p, f)
    assert bounds.lp_condition_rhs(thr, S, p, f) == pytest.approx(thr, rel=1e-9)
    # the condition holds strictly above and fails below
    assert bounds.lp_condition_rhs(1.01 * thr, S, p, f) < 1.01 * thr
    assert bounds.lp_condition_rhs(0.99 * thr, S, p, f) > 0.99 * thr
