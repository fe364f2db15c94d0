"""Geometry and light-cone arithmetic for a two-source Bell-test layout.

Everything here is a pure function of its inputs.  Distances between
celestial sources and Earth are carried in light-years, lab-scale
distances in meters, durations in seconds.  Light-years and years are
both defined through the Julian year (365.25 d), so a distance of
L light-years corresponds to a light travel time of numerically L years.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .catalog import CelestialSource

SPEED_OF_LIGHT_M_S = 299_792_458.0
JULIAN_YEAR_S = 365.25 * 86_400.0
LIGHT_YEAR_M = SPEED_OF_LIGHT_M_S * JULIAN_YEAR_S
DEFAULT_FIBER_INDEX = 1.45


@dataclass(frozen=True)
class HorizontalPointing:
    """Telescope pointing in the horizontal system: azimuth and altitude, degrees."""

    az_deg: float
    alt_deg: float

    def __post_init__(self):
        if not 0.0 <= self.az_deg < 360.0:
            raise ValueError(f"azimuth must be in [0, 360), got {self.az_deg}")
        if not 0.0 <= self.alt_deg <= 90.0:
            raise ValueError(f"altitude must be in [0, 90], got {self.alt_deg}")


@dataclass(frozen=True)
class TimingBudget:
    """Per-attempt timing budget: clock window, basis choice, state measurement, margin.

    All fields in seconds.
    """

    t_window_s: float
    t_basis_s: float
    t_measurement_s: float
    t_margin_s: float

    def __post_init__(self):
        for name in ("t_window_s", "t_basis_s", "t_measurement_s", "t_margin_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def total_s(self) -> float:
        return self.t_window_s + self.t_basis_s + self.t_measurement_s + self.t_margin_s


@dataclass(frozen=True)
class TimeConstraint:
    """Minimum look-back times (years) for hidden-variable mechanisms, with 1-sigma uncertainties.

    ``tau1`` constrains mechanisms tied to either single source, ``tau2``
    mechanisms correlating both sources, and ``tau = min(tau1, tau2)`` is
    the binding constraint (its sigma is the minimizer's sigma).
    """

    tau1_yr: float
    sigma_tau1_yr: float
    tau2_yr: float
    sigma_tau2_yr: float
    tau_yr: float
    sigma_tau_yr: float

    def __post_init__(self):
        if self.tau2_yr < self.tau1_yr * (1 - 1e-12):
            raise ValueError("tau2 must be >= tau1")
        if abs(self.tau_yr - min(self.tau1_yr, self.tau2_yr)) > 1e-9 * max(1.0, self.tau_yr):
            raise ValueError("tau must equal min(tau1, tau2)")


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a pair of space-like separation inequalities.

    ``slack_s`` holds the right-hand side minus the left-hand side of each
    inequality, in seconds; both must be strictly positive for the
    arrangement to hold.
    """

    holds: bool
    slack_s: tuple[float, float]


def angular_separation(a: "CelestialSource", b: "CelestialSource") -> float:
    """Great-circle angle between two sources, in degrees [0, 180].

    cos(theta) = sin(dec1) sin(dec2) + cos(dec1) cos(dec2) cos(ra1 - ra2)
    """
    if a.ra_deg is None or a.dec_deg is None:
        raise ValueError(f"source {a.name!r} has no coordinates")
    if b.ra_deg is None or b.dec_deg is None:
        raise ValueError(f"source {b.name!r} has no coordinates")
    ra1, dec1 = math.radians(a.ra_deg), math.radians(a.dec_deg)
    ra2, dec2 = math.radians(b.ra_deg), math.radians(b.dec_deg)
    c = math.sin(dec1) * math.sin(dec2) + math.cos(dec1) * math.cos(dec2) * math.cos(ra1 - ra2)
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def pair_separation(l1_ly: float, l2_ly: float, theta_deg: float) -> float:
    """Distance between two sources (light-years) from their Earth distances and angular separation.

    Law of cosines on the Earth-source-source triangle:
    L12 = sqrt(L1^2 + L2^2 - 2 L1 L2 cos(theta)).
    """
    if l1_ly <= 0 or l2_ly <= 0:
        raise ValueError("source distances must be positive")
    if not 0.0 <= theta_deg <= 180.0:
        raise ValueError(f"theta must be in [0, 180], got {theta_deg}")
    c = math.cos(math.radians(theta_deg))
    return math.sqrt(max(0.0, l1_ly * l1_ly + l2_ly * l2_ly - 2.0 * l1_ly * l2_ly * c))


def time_constraints(a: "CelestialSource", b: "CelestialSource") -> TimeConstraint:
    """Look-back time constraints for the source pair, with propagated uncertainties.

    tau1 = min(L1, L2)/c with the minimizing source's distance sigma.
    tau2 = (L1 + L2 + L12)/2c; its sigma is first-order propagation through
    (L1, L2) holding the angular separation fixed (the angular uncertainty
    is negligible against the ~50% distance uncertainties).  In light-year
    and Julian-year units L/c is numerically L, so the arithmetic below is
    carried out directly in light-years.
    """
    theta = angular_separation(a, b)
    l1, s1 = a.distance_ly, a.sigma_ly
    l2, s2 = b.distance_ly, b.sigma_ly
    l12 = pair_separation(l1, l2, theta)

    if l1 <= l2:
        tau1, sigma_tau1 = l1, s1
    else:
        tau1, sigma_tau1 = l2, s2

    tau2 = 0.5 * (l1 + l2 + l12)
    c = math.cos(math.radians(theta))
    # d(tau2)/dL1 = (tau2 - L2/2 - (L2/2) cos theta) / L12, and symmetrically
    # for L2; the shared denominator 2*tau2 - L1 - L2 equals L12.
    num = math.hypot(
        s1 * (tau2 - 0.5 * l2 - 0.5 * l2 * c),
        s2 * (tau2 - 0.5 * l1 - 0.5 * l1 * c),
    )
    denom = 2.0 * tau2 - l1 - l2
    sigma_tau2 = num / denom if denom > 0 else 0.0

    if tau1 <= tau2:
        tau, sigma_tau = tau1, sigma_tau1
    else:  # pragma: no cover - tau2 >= tau1 holds for all valid geometry
        tau, sigma_tau = tau2, sigma_tau2
    return TimeConstraint(tau1, sigma_tau1, tau2, sigma_tau2, tau, sigma_tau)


def axis_angle(p: HorizontalPointing) -> float:
    """Angle (degrees, [0, 90]) between the telescope optical axis and the north-south lab axis.

    alpha = arccos(|cos(alt) * cos(az)|)
    """
    c = abs(math.cos(math.radians(p.alt_deg)) * math.cos(math.radians(p.az_deg)))
    return math.degrees(math.acos(min(1.0, c)))


def min_lab_separation(budget: TimingBudget, alpha_deg: float) -> float:
    """Infimum of admissible distance (meters) between the two measurement labs.

    Space-like separation of the basis-choice and state-measurement events
    requires total_budget < (L/c) cos(alpha), i.e.
    L > c * total_budget / cos(alpha).
    """
    if alpha_deg >= 90.0:
        raise ValueError(
            f"alpha = {alpha_deg} deg: cos(alpha) <= 0 makes the separation bound unsatisfiable"
        )
    return SPEED_OF_LIGHT_M_S * budget.total_s / math.cos(math.radians(alpha_deg))


def min_entanglement_lead_time(l_m1m2_m: float, alpha_deg: float, n_fiber: float = DEFAULT_FIBER_INDEX) -> float:
    """Minimum time (seconds) by which entanglement must be prepared before the clock window.

    With the Bell-state-measurement lab midway between the stations and
    photons routed through fiber of index n:
    dT > (n - cos(alpha)) * L / 2c.
    """
    if l_m1m2_m < 0:
        raise ValueError("lab separation must be >= 0")
    if n_fiber < 1.0:
        raise ValueError("fiber index must be >= 1")
    c = math.cos(math.radians(alpha_deg))
    return (n_fiber - c) * l_m1m2_m / (2.0 * SPEED_OF_LIGHT_M_S)


def check_locality(
    l_s1m1_ly: float,
    l_s1m2_ly: float,
    l_s2m1_ly: float,
    l_s2m2_ly: float,
    budget: TimingBudget,
) -> CheckResult:
    """Locality inequalities on exact source-to-lab distances (light-years).

    Each lab's basis choice plus measurement must finish before light from
    the *other* lab's cosmic source could arrive:

        total_budget + L_S1M1/c < L_S1M2/c
        total_budget + L_S2M2/c < L_S2M1/c

    The budgets of the two labs are identical, and the total includes the
    propagation margin.  Returns the slack of each inequality in seconds.
    """
    for v in (l_s1m1_ly, l_s1m2_ly, l_s2m1_ly, l_s2m2_ly):
        if v <= 0:
            raise ValueError("distances must be positive")
    t = budget.total_s
    slack_a = (l_s1m2_ly - l_s1m1_ly) * JULIAN_YEAR_S - t
    slack_b = (l_s2m1_ly - l_s2m2_ly) * JULIAN_YEAR_S - t
    return CheckResult(holds=(slack_a > 0 and slack_b > 0), slack_s=(slack_a, slack_b))


def check_freedom_of_choice(
    l_s1m1_ly: float,
    l_s1b_ly: float,
    l_m1b_m: float,
    l_s2m2_ly: float,
    l_s2b_ly: float,
    l_m2b_m: float,
    delta_t_s: float,
    n_fiber: float = DEFAULT_FIBER_INDEX,
) -> CheckResult:
    """Freedom-of-choice inequalities (cosmic emission space-like from the BSM event).

    For each side, the photon sent to the Bell-state measurement through
    fiber (index n) must arrive before light from that side's cosmic source
    could reach the BSM lab, given entanglement prepared dT in advance:

        L_S1M1/c + n * L_M1B/c - dT < L_S1B/c

    Source-to-lab distances in light-years, lab-to-BSM distances in meters.
    """
    for v in (l_s1m1_ly, l_s1b_ly, l_s2m2_ly, l_s2b_ly):
        if v <= 0:
            raise ValueError("source distances must be positive")
    if l_m1b_m < 0 or l_m2b_m < 0:
        raise ValueError("lab-to-BSM distances must be >= 0")
    if delta_t_s < 0:
        raise ValueError("delta_t_s must be >= 0")
    fiber_a = n_fiber * l_m1b_m / SPEED_OF_LIGHT_M_S
    fiber_b = n_fiber * l_m2b_m / SPEED_OF_LIGHT_M_S
    slack_a = (l_s1b_ly - l_s1m1_ly) * JULIAN_YEAR_S - fiber_a + delta_t_s
    slack_b = (l_s2b_ly - l_s2m2_ly) * JULIAN_YEAR_S - fiber_b + delta_t_s
    return CheckResult(holds=(slack_a > 0 and slack_b > 0), slack_s=(slack_a, slack_b))
