"""Certified two-sided bounds for the invariant volume elements.

Everything here is arithmetic on the distance product p_D = tau_1 ... tau_n:

    convex:    (4n)^-n  <=  v(z) * p_D^2  <=  ((4^n - 1)/3)^n
    C-convex:  (16n)^-n <=  v(z) * p_D^2  <=  ((4^n - 1)/3)^n

valid simultaneously for the Caratheodory and the Kobayashi-Eisenman volume
element.  Intervals carry outward slack so that approximate tau backends stay
honest: a relative tau error eps enters p_D^2 as (1 + eps)^(2n).

Also here: the quotient lower bounds mu_n / nu_n, the diameter corollary, the
inscribed/circumscribed-ball monotonicity interval, and the two proof-device
maps (the component-wise Moebius map Psi and the 1/sqrt(n) polydisc scaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import CONVEX, C_CONVEX, OVERFLOW_LIMIT
from .errors import BadDimension, Pole, UnboundedDomain
from .linalg import as_cvector


def _cap(x: float) -> float:
    return math.inf if x > OVERFLOW_LIMIT else x


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] for a nonnegative quantity, with the relative
    outward inflation that was applied recorded in `slack`."""

    lo: float
    hi: float
    slack: float = 0.0

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError(f"negative lower endpoint {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def certified(cls, lo: float, hi: float, slack: float) -> "Interval":
        """Apply outward rounding: lo shrinks, hi grows, overflow becomes inf."""
        lo2 = max(0.0, lo * (1.0 - slack))
        hi2 = _cap(hi * (1.0 + slack))
        return cls(lo2, hi2, slack)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def containment_margin(self, x: float) -> float:
        """min distance of x to either endpoint; negative when x is outside."""
        return min(x - self.lo, self.hi - x)

    def intersects(self, other: "Interval") -> bool:
        return self.intersection_margin(other) >= 0.0

    def intersection_margin(self, other: "Interval") -> float:
        """Overlap length (negative gap when disjoint).  Two sound bounds on
        the same quantity must overlap, so a negative value is a violation."""
        return min(self.hi, other.hi) - max(self.lo, other.lo)

    def as_pair(self) -> tuple:
        return (self.lo, self.hi)


def compound_slack(tau_rel_err: float, n: int, base_slack: float = 1e-9) -> float:
    """Relative inflation for quantities of the form const / p_D^2."""
    return (1.0 + tau_rel_err) ** (2 * n) * (1.0 + base_slack) - 1.0


def ge_constants(convexity_class: str, n: int) -> tuple:
    """(lower, upper) constants bounding v * p_D^2."""
    if n < 2:
        raise BadDimension(f"the two-sided bounds need n >= 2, got {n}")
    upper = ((4.0 ** n - 1.0) / 3.0) ** n
    if convexity_class == CONVEX:
        return (4.0 * n) ** (-n), upper
    if convexity_class == C_CONVEX:
        return (16.0 * n) ** (-n), upper
    raise ValueError(f"unknown convexity class {convexity_class!r}")


def certified_interval(convexity_class: str, n: int, pD: float, *,
                       tau_rel_err: float = 0.0,
                       base_slack: float = 1e-9) -> Interval:
    """Two-sided certified interval for v(z) given the distance product."""
    if pD <= 0 or not math.isfinite(pD):
        raise ValueError(f"distance product must be positive and finite, got {pD}")
    lo_c, hi_c = ge_constants(convexity_class, n)
    pd2 = pD * pD
    slack = compound_slack(tau_rel_err, n, base_slack)
    return Interval.certified(lo_c / pd2, _cap(hi_c / pd2), slack)


@dataclass(frozen=True)
class QuotientBound:
    n: int
    convexity_class: str
    value: float  # mu_n (convex) or nu_n (C-convex), in (0, 1]


def quotient_lower_bound(convexity_class: str, n: int) -> QuotientBound:
    """Lower bound for the quotient invariant q = c_D / k_D."""
    if n < 2:
        raise BadDimension(f"quotient bounds need n >= 2, got {n}")
    if convexity_class == CONVEX:
        value = (3.0 / (4.0 * n * (4.0 ** n - 1.0))) ** n
    elif convexity_class == C_CONVEX:
        value = (3.0 / (16.0 * n * (4.0 ** n - 1.0))) ** n
    else:
        raise ValueError(f"unknown convexity class {convexity_class!r}")
    return QuotientBound(n, convexity_class, value)


def bounded_domain_lower_bound(convexity_class: str, n: int, diam: float) -> float:
    """v(z) >= 1/(4n diam^2)^n on bounded convex domains (16n for C-convex).

    Follows from the two-sided bound because every tau_j is at most diam.
    """
    if not math.isfinite(diam):
        raise UnboundedDomain("the diameter corollary needs a finite diameter")
    if diam <= 0:
        raise ValueError(f"diameter must be positive, got {diam}")
    if convexity_class == CONVEX:
        return (4.0 * n * diam * diam) ** (-n)
    if convexity_class == C_CONVEX:
        return (16.0 * n * diam * diam) ** (-n)
    raise ValueError(f"unknown convexity class {convexity_class!r}")


def monotonicity_bounds(basis, circumscribed: float, *,
                        base_slack: float = 1e-9) -> Interval:
    """v(z) between the values of the circumscribed and inscribed balls.

    B(z, tau_1) inside D inside B(z, R) and v of a radius-r ball at its center
    is r^(-2n); inclusion reverses the order of the volume elements.  R may be
    +inf (unbounded domain), which drops the lower endpoint to 0.
    """
    n = basis.n
    tau1 = float(basis.taus[0])
    if circumscribed < tau1 * (1.0 - 1e-12):
        raise ValueError(
            f"circumscribed radius {circumscribed} below inscribed tau_1 {tau1}")
    lo = 0.0 if math.isinf(circumscribed) else circumscribed ** (-2 * n)
    hi = _cap(tau1 ** (-2 * n))
    slack = compound_slack(basis.tau_rel_err, n, base_slack)
    return Interval.certified(lo, hi, slack)


def psi_map(z) -> np.ndarray:
    """Component-wise Moebius map z_j -> z_j/(2 - z_j).

    Sends the product of half-planes {Re z_j < 1} biholomorphically onto the
    unit polydisc, fixing 0; |z/(2-z)| < 1 is equivalent to Re z < 1.
    """
    z = as_cvector(z)
    den = 2.0 - z
    if np.any(np.abs(den) < 1e-12):
        raise Pole("psi has a pole at z_j = 2")
    return z / den


def psi_jacobian_det(z) -> complex:
    """det of the derivative of psi_map; each factor is 2/(2 - z_j)^2."""
    z = as_cvector(z)
    den = 2.0 - z
    if np.any(np.abs(den) < 1e-12):
        raise Pole("psi has a pole at z_j = 2")
    return complex(np.prod(2.0 / den ** 2))


def psi_det0_squared(n: int) -> float:
    """|det psi'(0)|^2 = 2^(-2n), the exact loss of the half-plane reduction."""
    return 4.0 ** (-n)


def scaling_bound_polydisc(n: int) -> float:
    """v of the unit polydisc at 0 is at least n^-n (scale by 1/sqrt(n) into
    the ball and use monotonicity)."""
    return float(n) ** (-n)
