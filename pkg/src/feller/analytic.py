"""Closed-form quantities of the absorbed driftless square-root diffusion.

The process ``dx = sigma * sqrt(x) dW`` started at ``x0 > 0`` with the
origin absorbing has an explicit transition law: a point mass at zero
(the paths already absorbed) plus a continuous density that is a scaled
non-central chi-squared distribution with zero degrees of freedom.  This
module evaluates that law and everything derived from it -- absorption
and survival probabilities, the characteristic function, first-passage
(hitting) time densities and their Brownian counterpart, moments, and
Monte Carlo confidence intervals.

All functions are pure and operate on scalars; no state is shared, so
they are safe to call concurrently.
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from scipy.integrate import quad
from scipy.special import ndtr, ndtri

from .bessel import bessel_i1_scaled

__all__ = [
    "ProcessParams",
    "DensityValue",
    "TruncatedMeanHittingTime",
    "absorption_probability",
    "survival_probability",
    "characteristic_function",
    "ncx2_zero_density",
    "ncx2_zero_density_series",
    "transition_density",
    "continuous_mass",
    "continuous_tail_bound",
    "hitting_time_density",
    "typical_hitting_time",
    "brownian_fpt_density",
    "truncated_mean_hitting_time",
    "mean_position",
    "variance_position",
    "ci_half_width",
]


@dataclass(frozen=True)
class ProcessParams:
    """Full parameterization of the diffusion: noise variance ``sigma2``,
    start point ``x0`` and start time ``t0``.

    ``x0 = 0`` is allowed as the degenerate already-absorbed case.
    """

    sigma2: float
    x0: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.sigma2 > 0.0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")
        if not self.x0 >= 0.0:
            raise ValueError(f"x0 must be >= 0, got {self.x0}")
        if not math.isfinite(self.t0):
            raise ValueError(f"t0 must be finite, got {self.t0}")


class DensityValue(NamedTuple):
    """One evaluation of a distribution with a point mass at zero:
    ``atom`` is the probability of being exactly at 0, ``continuous``
    the density value at the queried point."""

    atom: float
    continuous: float


class TruncatedMeanHittingTime(NamedTuple):
    """Truncated first moment of the hitting time plus a flag recording
    that the untruncated integral diverges (it does whenever ``x0 > 0``)."""

    value: float
    diverges: bool


def _elapsed(p: ProcessParams, t: float, allow_equal: bool = False) -> float:
    tau = t - p.t0
    if allow_equal:
        if tau < 0.0 or not math.isfinite(tau):
            raise ValueError(f"t must be >= t0={p.t0}, got t={t}")
    elif not tau > 0.0:
        raise ValueError(f"t must be > t0={p.t0}, got t={t}")
    return tau


def absorption_probability(p: ProcessParams, t: float) -> float:
    """Probability the walker has been absorbed at the origin by time ``t``.

    Equals ``exp(-2*x0 / (sigma2*(t-t0)))``: increasing in ``t``, tending
    to 1, so absorption is eventually certain for every start point.
    """
    tau = _elapsed(p, t)
    return math.exp(-2.0 * p.x0 / (p.sigma2 * tau))


def survival_probability(p: ProcessParams, t: float) -> float:
    """Probability the walker is still strictly positive at time ``t``.

    Computed as ``-expm1(...)`` so tiny survival probabilities (deep in
    the absorbed regime) keep full relative precision.
    """
    tau = _elapsed(p, t)
    return -math.expm1(-2.0 * p.x0 / (p.sigma2 * tau))


def characteristic_function(p: ProcessParams, k: float, t: float) -> complex:
    """``E[exp(i k x(t))]`` for real wavenumber ``k``.

    Entire in ``k``; equals 1 at ``k = 0`` (normalization), reduces to
    ``exp(i k x0)`` at ``t = t0``, and has modulus at most 1.
    """
    tau = _elapsed(p, t, allow_equal=True)
    return cmath.exp(1j * k * p.x0 / (1.0 - 0.5j * k * p.sigma2 * tau))


def ncx2_zero_density(x: float, lam: float) -> DensityValue:
    """Density of the zero-degrees-of-freedom non-central chi-squared law.

    The distribution mixes an atom ``exp(-lam/2)`` at zero with the
    continuous part ``(1/2) sqrt(lam/x) exp(-(x+lam)/2) I_1(sqrt(lam*x))``.
    The Bessel factor is evaluated in scaled form, so the result is finite
    for noncentralities well past ``1e6``.  At ``x = 0`` the continuous
    part is the analytic limit ``(lam/4) exp(-lam/2)`` rather than NaN,
    which lets histogram overlays include the first bin.
    """
    if not x >= 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if not lam >= 0.0:
        raise ValueError(f"noncentrality must be >= 0, got {lam}")
    atom = math.exp(-0.5 * lam)
    if lam == 0.0:
        return DensityValue(1.0, 0.0)
    if x == 0.0:
        return DensityValue(atom, 0.25 * lam * atom)
    z = math.sqrt(lam * x)
    # exp(-(x+lam)/2 + z) = exp(-(sqrt(x)-sqrt(lam))^2 / 2) <= 1: no overflow
    cont = 0.5 * math.sqrt(lam / x) * math.exp(z - 0.5 * (x + lam)) * bessel_i1_scaled(z)
    return DensityValue(atom, cont)


def ncx2_zero_density_series(x: float, lam: float, j_max: int) -> DensityValue:
    """Truncated Poisson-mixture form of :func:`ncx2_zero_density`.

    Sums ``exp(-lam/2) * sum_{j=1..j_max} (lam/2)^j / j! * q(x; 2j)`` with
    ``q(.; nu)`` the central chi-squared density.  Exists purely as an
    independent cross-check of the Bessel form: the partial sum increases
    to it as ``j_max`` grows.
    """
    if not x >= 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if not lam >= 0.0:
        raise ValueError(f"noncentrality must be >= 0, got {lam}")
    if j_max < 1:
        raise ValueError(f"j_max must be >= 1, got {j_max}")
    atom = math.exp(-0.5 * lam)
    if lam == 0.0 or x == 0.0:
        # q(0; 2) = 1/2 is the only nonvanishing central term at x = 0
        cont = 0.25 * lam * atom if x == 0.0 and lam > 0.0 else 0.0
        if lam == 0.0:
            return DensityValue(1.0, 0.0)
        return DensityValue(atom, cont)
    # term_j = (lam/2)^j / j! * x^(j-1) e^{-x/2} / (2^j (j-1)!)
    #        = e^{-x/2}/x * (lam x / 4)^j / (j! (j-1)!)
    q = 0.25 * lam * x
    term = q
    total = term
    for j in range(2, j_max + 1):
        term *= q / (j * (j - 1))
        total += term
    cont = atom * math.exp(-0.5 * x) / x * total
    return DensityValue(atom, cont)


def _scaling(p: ProcessParams, tau: float) -> tuple[float, float]:
    # noncentrality and spatial scale of the transition law over tau
    c = 0.25 * p.sigma2 * tau
    lam = p.x0 / c
    return lam, c


def transition_density(p: ProcessParams, x: float, t: float) -> DensityValue:
    """Transition law of the diffusion at position ``x``, time ``t``.

    With ``lam = 4*x0/(sigma2*(t-t0))`` and scale ``c = sigma2*(t-t0)/4``,
    the atom is ``exp(-lam/2)`` (the absorption probability) and the
    continuous part is the zero-df non-central chi-squared density at
    ``x/c`` divided by ``c`` -- the change-of-variables factor is applied.
    """
    if not x >= 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    tau = _elapsed(p, t)
    lam, c = _scaling(p, tau)
    atom, cont = ncx2_zero_density(x / c, lam)
    return DensityValue(atom, cont / c)


def continuous_mass(p: ProcessParams, t: float, x_hi: Optional[float] = None) -> float:
    """Quadrature of the continuous part of :func:`transition_density`
    over ``[0, x_hi]``.

    The default upper limit ``x0 + 40*sqrt(variance)`` leaves a remainder
    bounded by :func:`continuous_tail_bound`, which is far below the
    1e-10 quadrature tolerance for every sane parameter set.  Together
    with the atom the result should reproduce total mass 1.
    """
    tau = _elapsed(p, t)
    if p.x0 == 0.0:
        return 0.0
    if x_hi is None:
        x_hi = p.x0 + 40.0 * math.sqrt(variance_position(p, t))
    val, _ = quad(
        lambda x: transition_density(p, x, t).continuous,
        0.0,
        x_hi,
        epsabs=1e-12,
        epsrel=1e-11,
        limit=200,
        points=[p.x0],
    )
    return val


def continuous_tail_bound(p: ProcessParams, t: float, x_hi: float) -> float:
    """Analytic upper bound on the continuous transition mass above ``x_hi``.

    Uses ``I_1(z) <= exp(z)/sqrt(2 pi z)`` to dominate the density by a
    Gaussian in ``sqrt(x/c)``, then bounds the remaining integral by a
    normal tail.  Loose but safe; used to certify truncated quadratures.
    """
    tau = _elapsed(p, t)
    lam, c = _scaling(p, tau)
    if lam == 0.0:
        return 0.0
    y = x_hi / c
    w = math.sqrt(y) - math.sqrt(lam)
    if w <= 0.0:
        return 1.0
    return lam ** 0.25 * y ** -0.25 * ndtr(-w)


def hitting_time_density(p: ProcessParams, t: float) -> float:
    """Density of the first-passage time to the origin.

    Equals ``(2*x0/(sigma2*(t-t0)^2)) * exp(-2*x0/(sigma2*(t-t0)))``,
    which is minus the time derivative of :func:`survival_probability`;
    the large-time tail falls off like ``t^-2``, slowly enough that the
    mean hitting time diverges.
    """
    tau = _elapsed(p, t)
    a = 2.0 * p.x0 / p.sigma2
    return a / (tau * tau) * math.exp(-a / tau)


def typical_hitting_time(p: ProcessParams) -> float:
    """Mode of the hitting-time density: ``t0 + x0/sigma2``."""
    if p.x0 == 0.0:
        raise ValueError("typical hitting time undefined for x0 = 0")
    return p.t0 + p.x0 / p.sigma2


def brownian_fpt_density(x0: float, sigma2: float, t: float) -> float:
    """First-passage density of absorbed Brownian motion started at ``x0``.

    The Levy density ``x0/(sqrt(2*pi)*sigma*t^{3/2}) * exp(-x0^2/(2*sigma2*t))``:
    integrates to 1 (absorption certain), mode at ``x0^2/(3*sigma2)``, and
    a ``t^{-3/2}`` power-law tail that again makes the mean infinite.
    """
    if not x0 > 0.0:
        raise ValueError(f"x0 must be > 0, got {x0}")
    if not sigma2 > 0.0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    return x0 / math.sqrt(2.0 * math.pi * sigma2) * t ** -1.5 * math.exp(
        -x0 * x0 / (2.0 * sigma2 * t)
    )


def truncated_mean_hitting_time(p: ProcessParams, T: float) -> TruncatedMeanHittingTime:
    """``integral of t*f(t)`` over ``(t0, T]`` plus a divergence flag.

    The untruncated mean is infinite for every ``x0 > 0`` because
    ``t*f(t) ~ 2*x0/(sigma2*t)``; the truncated value accordingly grows
    like ``(2*x0/sigma2) * ln(T)``.  Integration is performed in
    log-time, where the integrand is smooth over the whole (possibly
    huge) range.
    """
    span = _elapsed(p, T)
    if p.x0 == 0.0:
        return TruncatedMeanHittingTime(0.0, False)
    a = 2.0 * p.x0 / p.sigma2
    u_hi = math.log(span)
    u_lo = math.log(a) - 45.0  # below this exp(-a/tau) underflows to zero
    if u_lo >= u_hi:
        return TruncatedMeanHittingTime(0.0, True)

    def integrand(u: float) -> float:
        tau = math.exp(u)
        return (p.t0 + tau) * (a / tau) * math.exp(-a / tau)

    val, _ = quad(integrand, u_lo, u_hi, epsabs=1e-12, epsrel=1e-11, limit=400)
    return TruncatedMeanHittingTime(val, True)


def mean_position(p: ProcessParams, t: float) -> float:
    """Expected position at time ``t``: always ``x0`` (the process is a
    martingale, absorption notwithstanding)."""
    _elapsed(p, t, allow_equal=True)
    return p.x0


def variance_position(p: ProcessParams, t: float) -> float:
    """Variance of the position at time ``t``: ``sigma2 * x0 * (t - t0)``."""
    tau = _elapsed(p, t, allow_equal=True)
    return p.sigma2 * p.x0 * tau


def ci_half_width(p: ProcessParams, t: float, n_paths: int, alpha: float) -> float:
    """Half-width of the normal-theory confidence interval for the Monte
    Carlo mean position over ``n_paths`` independent paths.

    ``Phi^{-1}(1 - alpha/2) * sqrt(sigma2 * x0 * (t - t0) / n_paths)``,
    e.g. multiplier 1.96 at ``alpha = 0.05`` and 2.58 at ``alpha = 0.01``.
    """
    tau = _elapsed(p, t)
    if n_paths < 1:
        raise ValueError(f"n_paths must be >= 1, got {n_paths}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return ndtri(1.0 - 0.5 * alpha) * math.sqrt(p.sigma2 * p.x0 * tau / n_paths)
