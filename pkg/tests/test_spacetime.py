import math
from types import SimpleNamespace

import pytest
from hypothesis import given, strategies as st

from cosmicrng.spacetime import (
    JULIAN_YEAR_S,
    SPEED_OF_LIGHT_M_S,
    HorizontalPointing,
    TimingBudget,
    angular_separation,
    axis_angle,
    check_freedom_of_choice,
    check_locality,
    min_entanglement_lead_time,
    min_lab_separation,
    pair_separation,
    time_constraints,
)

C = SPEED_OF_LIGHT_M_S
PAPER_BUDGET = TimingBudget(t_window_s=8e-6, t_basis_s=1e-6, t_measurement_s=4e-6, t_margin_s=1e-6)


def src(ra, dec, dist=1000.0, sigma=0.0, name="S"):
    # lightweight stand-in: the geometry only reads coordinates and distances
    return SimpleNamespace(
        name=name, ra_deg=ra, dec_deg=dec, distance_ly=dist, sigma_ly=sigma
    )


class TestAngularSeparation:
    def test_coincident_directions(self):
        assert angular_separation(src(10.0, 20.0), src(10.0, 20.0)) == pytest.approx(0.0, abs=1e-9)

    def test_antipodal(self):
        assert angular_separation(src(0.0, 0.0), src(180.0, 0.0)) == pytest.approx(180.0)

    def test_bell_pair_value(self, bell_pair):
        assert angular_separation(*bell_pair) == pytest.approx(131.554, abs=0.001)

    def test_missing_coordinates_rejected(self):
        with pytest.raises(ValueError, match="no coordinates"):
            angular_separation(src(None, None), src(0.0, 0.0))

    @given(
        ra1=st.floats(0, 360, exclude_max=True),
        dec1=st.floats(-90, 90),
        ra2=st.floats(0, 360, exclude_max=True),
        dec2=st.floats(-90, 90),
    )
    def test_symmetric_and_periodic(self, ra1, dec1, ra2, dec2):
        a, b = src(ra1, dec1), src(ra2, dec2)
        th = angular_separation(a, b)
        assert 0.0 <= th <= 180.0
        assert angular_separation(b, a) == pytest.approx(th, abs=1e-9)
        assert angular_separation(src(ra1 + 360.0, dec1), b) == pytest.approx(th, abs=1e-6)


class TestPairSeparation:
    def test_coincident(self):
        assert pair_separation(500.0, 500.0, 0.0) == pytest.approx(0.0, abs=1e-9)

    def test_collinear_opposite(self):
        assert pair_separation(100.0, 250.0, 180.0) == pytest.approx(350.0)

    def test_reported_value(self):
        assert pair_separation(3325.0, 3454.0, 131.6) == pytest.approx(6183.5, abs=0.1)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            pair_separation(-1.0, 10.0, 90.0)
        with pytest.raises(ValueError):
            pair_separation(1.0, 10.0, 181.0)

    @given(
        l1=st.floats(1e-3, 1e8),
        l2=st.floats(1e-3, 1e8),
        theta=st.floats(0, 180),
    )
    def test_triangle_inequality(self, l1, l2, theta):
        l12 = pair_separation(l1, l2, theta)
        assert abs(l1 - l2) - 1e-6 * (l1 + l2) <= l12 <= (l1 + l2) * (1 + 1e-12)


class TestTimeConstraints:
    def test_bell_pair_values(self, bell_pair):
        tc = time_constraints(*bell_pair)
        assert tc.tau1_yr == 3325.0
        assert tc.sigma_tau1_yr == 1649.0
        assert tc.tau2_yr == pytest.approx(6480.7, abs=0.1)
        assert tc.sigma_tau2_yr == pytest.approx(2087.9, abs=0.1)
        assert tc.tau_yr == 3325.0
        assert tc.sigma_tau_yr == 1649.0

    def test_degenerate_geometry(self):
        a = src(10.0, -5.0, dist=777.0, sigma=0.0)
        b = src(10.0, -5.0, dist=777.0, sigma=0.0)
        tc = time_constraints(a, b)
        assert tc.tau1_yr == tc.tau2_yr == tc.tau_yr == 777.0
        assert tc.sigma_tau1_yr == tc.sigma_tau2_yr == tc.sigma_tau_yr == 0.0

    def test_sigma_matches_central_differences(self, bell_pair):
        # independent oracle: propagate tau2 = (L1 + L2 + L12)/2 numerically
        a, b = bell_pair
        theta = angular_separation(a, b)

        def tau2(l1, l2):
            return 0.5 * (l1 + l2 + pair_separation(l1, l2, theta))

        h = 1e-4
        d1 = (tau2(a.distance_ly + h, b.distance_ly) - tau2(a.distance_ly - h, b.distance_ly)) / (2 * h)
        d2 = (tau2(a.distance_ly, b.distance_ly + h) - tau2(a.distance_ly, b.distance_ly - h)) / (2 * h)
        expected = math.hypot(d1 * a.sigma_ly, d2 * b.sigma_ly)
        got = time_constraints(a, b).sigma_tau2_yr
        assert got == pytest.approx(expected, rel=1e-4)

    @given(
        dec1=st.floats(-90, 90),
        dec2=st.floats(-90, 90),
        ra1=st.floats(0, 360, exclude_max=True),
        ra2=st.floats(0, 360, exclude_max=True),
        l1=st.floats(1, 1e6),
        l2=st.floats(1, 1e6),
        s1=st.floats(0, 1e4),
        s2=st.floats(0, 1e4),
    )
    def test_tau2_dominates_tau1(self, dec1, dec2, ra1, ra2, l1, l2, s1, s2):
        tc = time_constraints(src(ra1, dec1, l1, s1), src(ra2, dec2, l2, s2))
        assert tc.tau2_yr >= tc.tau1_yr * (1 - 1e-12)
        assert tc.tau_yr == tc.tau1_yr


class TestAxisAngle:
    def test_on_axis(self):
        assert axis_angle(HorizontalPointing(0.0, 0.0)) == pytest.approx(0.0)

    def test_station1_pointing(self):
        assert axis_angle(HorizontalPointing(162.0, 23.0)) == pytest.approx(28.90, abs=0.01)

    def test_station2_pointing(self):
        assert axis_angle(HorizontalPointing(352.0, 24.0)) == pytest.approx(25.22, abs=0.01)

    def test_pointing_validation(self):
        with pytest.raises(ValueError):
            HorizontalPointing(360.0, 10.0)
        with pytest.raises(ValueError):
            HorizontalPointing(10.0, 91.0)

    @given(az=st.floats(0, 360, exclude_max=True), alt=st.floats(0, 90))
    def test_range(self, az, alt):
        assert 0.0 <= axis_angle(HorizontalPointing(az, alt)) <= 90.0


class TestMinLabSeparation:
    def test_reference_value(self):
        assert min_lab_separation(PAPER_BUDGET, 30.0) == pytest.approx(4846.39, abs=0.01)

    def test_zero_budget(self):
        zero = TimingBudget(0.0, 0.0, 0.0, 0.0)
        assert min_lab_separation(zero, 45.0) == 0.0

    def test_axis_aligned_microsecond(self):
        budget = TimingBudget(1e-6, 0.0, 0.0, 0.0)
        assert min_lab_separation(budget, 0.0) == pytest.approx(299.792458, abs=1e-6)

    def test_geometry_error_at_90(self):
        with pytest.raises(ValueError, match="unsatisfiable"):
            min_lab_separation(PAPER_BUDGET, 90.0)

    @given(
        tw=st.floats(0, 1e-3),
        tb=st.floats(0, 1e-3),
        tm=st.floats(0, 1e-3),
        tg=st.floats(0, 1e-3),
        alpha=st.floats(0, 89.0),
        bump=st.floats(1e-9, 1e-3),
    )
    def test_monotone_in_budget_and_alpha(self, tw, tb, tm, tg, alpha, bump):
        base = TimingBudget(tw, tb, tm, tg)
        ref = min_lab_separation(base, alpha)
        assert min_lab_separation(TimingBudget(tw + bump, tb, tm, tg), alpha) > ref
        assert min_lab_separation(TimingBudget(tw, tb + bump, tm, tg), alpha) > ref
        assert min_lab_separation(TimingBudget(tw, tb, tm + bump, tg), alpha) > ref
        assert min_lab_separation(TimingBudget(tw, tb, tm, tg + bump), alpha) > ref
        if base.total_s > 0 and alpha + 0.5 < 90.0:
            assert min_lab_separation(base, alpha + 0.5) > ref


class TestLeadTime:
    def test_reference_value(self):
        assert min_entanglement_lead_time(5000.0, 30.0, 1.45) == pytest.approx(4.8698e-6, abs=2e-10)

    def test_zero_separation(self):
        assert min_entanglement_lead_time(0.0, 30.0, 1.45) == 0.0

    def test_axis_aligned(self):
        assert min_entanglement_lead_time(5000.0, 0.0, 1.45) == pytest.approx(3.7526e-6, abs=1e-10)

    def test_validation(self):
        with pytest.raises(ValueError):
            min_entanglement_lead_time(-1.0, 30.0)
        with pytest.raises(ValueError):
            min_entanglement_lead_time(10.0, 30.0, 0.9)


class TestCheckLocality:
    def test_boundary_plus_margin(self):
        # place the far-lab distances exactly one budget-total plus 1 us beyond
        base1, base2 = 1e-12, 2e-12  # light-years; tiny values keep doubles exact
        delta_yr = (PAPER_BUDGET.total_s + 1e-6) / JULIAN_YEAR_S
        res = check_locality(base1, base1 + delta_yr, base2 + delta_yr, base2, PAPER_BUDGET)
        assert res.holds
        assert res.slack_s[0] == pytest.approx(1e-6, rel=1e-6)
        assert res.slack_s[1] == pytest.approx(1e-6, rel=1e-6)

    def test_zero_budget_any_ordering(self):
        zero = TimingBudget(0.0, 0.0, 0.0, 0.0)
        assert check_locality(1e-12, 2e-12, 2e-12, 1e-12, zero).holds

    def test_equal_distances_fail(self):
        res = check_locality(1e-12, 1e-12, 1e-12, 1e-12, PAPER_BUDGET)
        assert not res.holds
        assert res.slack_s[0] < 0 and res.slack_s[1] < 0

    def test_small_angle_substitution_around_bound(self, bell_pair):
        # distance differences follow the lab-axis projection L * cos(alpha)
        a, b = bell_pair
        alpha1 = axis_angle(HorizontalPointing(162.0, 23.0))
        alpha2 = axis_angle(HorizontalPointing(352.0, 24.0))
        bound = min_lab_separation(PAPER_BUDGET, max(alpha1, alpha2))

        def layout(lab_sep_m):
            d1 = lab_sep_m * math.cos(math.radians(alpha1)) / (C * JULIAN_YEAR_S)
            d2 = lab_sep_m * math.cos(math.radians(alpha2)) / (C * JULIAN_YEAR_S)
            return check_locality(
                a.distance_ly, a.distance_ly + d1, b.distance_ly + d2, b.distance_ly,
                PAPER_BUDGET,
            )

        assert not layout(bound * 0.98).holds
        # the bound is set by the larger alpha; the smaller-alpha side has
        # extra slack, so slightly above the bound both inequalities hold
        assert layout(bound * 1.02).holds


class TestCheckFreedomOfChoice:
    def test_eq6_construction_holds(self):
        lab_sep, alpha, n = 5000.0, 30.0, 1.45
        half = lab_sep / 2.0
        proj_yr = half * math.cos(math.radians(alpha)) / (C * JULIAN_YEAR_S)
        dt = min_entanglement_lead_time(lab_sep, alpha, n) + 0.1e-6
        res = check_freedom_of_choice(
            l_s1m1_ly=0.01, l_s1b_ly=0.01 + proj_yr, l_m1b_m=half,
            l_s2m2_ly=0.01, l_s2b_ly=0.01 + proj_yr, l_m2b_m=half,
            delta_t_s=dt, n_fiber=n,
        )
        assert res.holds
        assert res.slack_s[0] == pytest.approx(0.1e-6, rel=1e-3)
        assert res.slack_s[1] == pytest.approx(0.1e-6, rel=1e-3)

    def test_no_lead_time_fails(self):
        res = check_freedom_of_choice(
            l_s1m1_ly=1e-10, l_s1b_ly=1e-10, l_m1b_m=100.0,
            l_s2m2_ly=1e-10, l_s2b_ly=1e-10, l_m2b_m=100.0,
            delta_t_s=0.0,
        )
        assert not res.holds

    def test_colocated_labs_hold(self):
        res = check_freedom_of_choice(
            l_s1m1_ly=1e-12, l_s1b_ly=2e-12, l_m1b_m=0.0,
            l_s2m2_ly=1e-12, l_s2b_ly=2e-12, l_m2b_m=0.0,
            delta_t_s=0.0,
        )
        assert res.holds


def test_budget_validation():
    with pytest.raises(ValueError):
        TimingBudget(-1e-6, 0.0, 0.0, 0.0)
    assert PAPER_BUDGET.total_s == pytest.approx(14e-6)
