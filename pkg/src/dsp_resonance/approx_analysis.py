"""Executable versions of the asymptotic estimates behind the construction.

Everything here turns an order-of-magnitude statement into a measured
number: local-CLT error slopes, out-of-window tail masses, the exact
fractional-sum identity, the heat-kernel surrogate probes w and their
parity corrections, and the closed-form expression for the difference of
surrogates at two nearby rational speeds.

A desk-scale caveat documented once and relied on throughout: for the
small-denominator speeds exercised here, most of these quantities decay
*much* faster than their guaranteed power-law envelopes and reach the
double-precision floor already for |x| of a few hundred.  Envelope checks
are therefore one-sided (measured <= bound); fitted constants are only
meaningful on probe ranges where the signal is alive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .dsp_construct import ProbeContext, v_probe
from .kernels import binom_kernel_many, frac, heat_kernel_deriv, heat_kernel_dx
from .quadrature import adaptive_simpson, gauss_panels
from .scalar_profile import RationalSpeed
from .summation import kahan_sum
from .windows import EXP_THRESHOLD, heat_sum_window, kernel_sum_window, paper_interval

__all__ = [
    "ResonanceParams",
    "ErrorBudget",
    "clt_error_scan",
    "tail_mass_discrete",
    "tail_mass_heat",
    "frac_identity_check",
    "w_probe",
    "parity_sum",
    "v_minus_w",
    "w_diff_closed_form",
    "technical_lhs_rhs",
    "fit_power_law",
]


# ---------------------------------------------------------------------------
# parameters of the perturbed-speed family

@dataclass(frozen=True)
class ResonanceParams:
    """Base speed 1/2 against the perturbed speed k/(2k+1), k even.

    epsilon = -1/(4k+2) exactly; beta = 2*lam/lam_tilde and
    gamma = 2/lam_tilde^(3/2) are the phase and stretch factors of the
    downstream oscillation integral.
    """

    k: int
    delta: float = 0.1

    def __post_init__(self) -> None:
        if self.k < 2 or self.k % 2 != 0:
            raise ValueError("k must be an even integer >= 2")
        if not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")

    @property
    def lam(self) -> RationalSpeed:
        return RationalSpeed(1, 2, role="base")

    @property
    def lam_tilde(self) -> RationalSpeed:
        return RationalSpeed(self.k, 2 * self.k + 1, role="perturbed")

    @property
    def epsilon_fraction(self) -> Fraction:
        return Fraction(self.k, 2 * self.k + 1) - Fraction(1, 2)

    @property
    def epsilon(self) -> float:
        return float(self.epsilon_fraction)

    @property
    def beta_fraction(self) -> Fraction:
        return 2 * Fraction(1, 2) / Fraction(self.k, 2 * self.k + 1)

    @property
    def beta(self) -> float:
        return float(self.beta_fraction)

    @property
    def gamma(self) -> float:
        return 2.0 / self.lam_tilde.value ** 1.5


@dataclass(frozen=True)
class ErrorBudget:
    """Budget C_a*q/y^(1-delta) + C_b*|eps|*q^2/y^(1/2-delta) (+ tail, quad)."""

    C_a: float
    C_b: float
    tail_term: float = 0.0
    quadrature_term: float = 0.0

    def __post_init__(self) -> None:
        for v in (self.C_a, self.C_b, self.tail_term, self.quadrature_term):
            if v < 0:
                raise ValueError("budget components must be nonnegative")

    def evaluate(self, y: float, eps: float, q: int, delta: float) -> float:
        return (self.C_a * q / y ** (1.0 - delta)
                + self.C_b * abs(eps) * q * q / y ** (0.5 - delta)
                + self.tail_term + self.quadrature_term)


def fit_power_law(xs: Sequence[float], ys: Sequence[float],
                  floor: float = 0.0) -> Tuple[float, float]:
    """(slope, amplitude) of a log-log least-squares fit of |ys| vs xs."""
    xs = np.abs(np.asarray(xs, dtype=np.float64))
    ys = np.maximum(np.abs(np.asarray(ys, dtype=np.float64)), floor)
    if np.any(ys == 0.0):
        raise ValueError("zero values need a positive floor to fit")
    slope, logc = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(math.exp(logc))


# ---------------------------------------------------------------------------
# local CLT

def clt_error_scan(n_list: Sequence[int], delta: float = 0.1) -> Tuple[List[Tuple[int, float]], float]:
    """Max |K[n,k] - 2G(n/2,k)| over |k| <= n^(1/2+delta), plus the fitted slope."""
    if list(n_list) != sorted(n_list):
        raise ValueError("n_list must be ascending")
    rows: List[Tuple[int, float]] = []
    for n in n_list:
        kmax = int(n ** (0.5 + delta))
        ks = np.arange(-kmax, kmax + 1, dtype=np.int64)
        ks = ks[((ks + n) & 1) == 0]
        vals = binom_kernel_many(np.full(ks.shape, n, dtype=np.int64), ks)
        clt = 2.0 * np.exp(-ks.astype(np.float64) ** 2 / (2.0 * n)) / (
            2.0 * np.sqrt(np.pi * n / 2.0))
        rows.append((int(n), float(np.max(np.abs(vals - clt)))))
    slope, _ = fit_power_law([r[0] for r in rows], [r[1] for r in rows])
    return rows, slope


# ---------------------------------------------------------------------------
# tail masses outside the analysis interval

def tail_mass_discrete(y: float, lam: float, delta: float) -> float:
    """Kernel mass at staircase offsets outside I(|y|; lam, delta).

    Computed terms run to n = 8|y|; the geometric envelope (2/3)^(n/4) of the
    far tail is added in closed form.
    """
    if y >= 0:
        raise ValueError("y must be negative")
    lo_i, hi_i = paper_interval(-y, lam, delta)
    n_hi = int(math.ceil(8.0 * abs(y)))
    ns = np.arange(1, n_hi + 1, dtype=np.int64)
    inside = (ns >= lo_i) & (ns <= hi_i)
    ns = ns[~inside]
    kk = np.floor(y + lam * ns.astype(np.float64)).astype(np.int64)
    vals = binom_kernel_many(ns, kk)
    r = (2.0 / 3.0) ** 0.25
    geom_rest = (2.0 / 3.0) ** (n_hi / 4.0) * r / (1.0 - r)
    return kahan_sum(vals) + geom_rest


_DERIV_SUP_CACHE: dict = {}


def _deriv_sup_factor(order: int) -> float:
    # sup_x |d^m/dx^m G(1, x)|, used for analytic far-tail bounds
    if order in _DERIV_SUP_CACHE:
        return _DERIV_SUP_CACHE[order]
    xs = np.linspace(-12.0, 12.0, 4801)
    sup = max(abs(heat_kernel_deriv(1.0, float(x), order)) for x in xs) if order >= 1 \
        else max(math.exp(-x * x / 4.0) / (2.0 * math.sqrt(math.pi)) for x in xs)
    _DERIV_SUP_CACHE[order] = sup
    return sup


def tail_mass_heat(y: float, lam: float, delta: float, order: int = 0) -> float:
    """Integral of |d^order_x G(t, y + lam t)| over R+ minus I(|y|; lam, delta).

    Adaptive quadrature to t = 4|y|, then the scaling bound
    |d^m_x G(t, .)| <= C_m t^-(m+1)/2 combined with the Gaussian argument
    growth gives a closed-form remainder.
    """
    if y >= 0:
        raise ValueError("y must be negative")
    if order < 0:
        raise ValueError("order must be >= 0")
    lo_i, hi_i = paper_interval(-y, lam, delta)
    lo_i = max(lo_i, 0.0)
    t_far = 4.0 * abs(y)

    if order == 0:
        def f(t):
            return math.exp(-(y + lam * t) ** 2 / (4.0 * t)) / (2.0 * math.sqrt(math.pi * t))
    else:
        def f(t):
            return abs(heat_kernel_deriv(t, y + lam * t, order))

    total = 0.0
    if lo_i > 1e-12:
        total += quad(f, 1e-12, lo_i, limit=400)[0]
    if hi_i < t_far:
        total += quad(f, hi_i, t_far, limit=400)[0]
    # far remainder: |arg| = |y + lam t| >= lam t / 2 for t >= 4|y|/lam >= t_far
    c = _deriv_sup_factor(order)
    rate = lam * lam / 16.0
    rest = c * math.exp(-rate * t_far) / rate / max(1.0, t_far ** ((order + 1) / 2.0))
    return total + rest


# ---------------------------------------------------------------------------
# fractional-sum identity

def frac_identity_check(z: float, p: int, q: int) -> Tuple[float, float]:
    """(lhs, rhs) of sum_j ((z + p*j/q)) = ((q*z)) + (q-1)/2."""
    if q <= 0:
        raise ValueError("q must be positive")
    if math.gcd(abs(p), q) != 1:
        raise ValueError("p and q must be coprime")
    lhs = kahan_sum([frac(z + p * j / q) for j in range(1, q + 1)])
    rhs = frac(q * z) + (q - 1) / 2.0
    return lhs, rhs


# ---------------------------------------------------------------------------
# heat-kernel surrogate probes

def w_probe(ctx: ProbeContext, thr: float = EXP_THRESHOLD) -> float:
    """2 * sum_n G(n/2, [[z_n]]) over the certified window."""
    win = ctx.eval_window(thr)
    if win is None:
        return 0.0
    lo, hi = win
    ns = np.arange(max(lo, 1), hi + 1, dtype=np.int64)
    if ns.size == 0:
        return 0.0
    kk = np.floor(ctx.z_n(ns))
    tt = ns.astype(np.float64) / 2.0
    terms = 2.0 * np.exp(-kk * kk / (4.0 * tt)) / (2.0 * np.sqrt(np.pi * tt))
    return kahan_sum(terms)


def _is_supported_speed(lam: RationalSpeed) -> bool:
    if (lam.p, lam.q) == (1, 2):
        return True
    return lam.q == 2 * lam.p + 1 and lam.p % 2 == 0


def parity_sum(ctx: ProbeContext, thr: float = EXP_THRESHOLD) -> float:
    """sum of G_x(n/2, z_n) over window indices with n - [[z_n]] odd.

    Only the base speed 1/2 and the perturbed family k/(2k+1), k even, are
    accepted: the regular-grid pairing that controls this sum is specific
    to those speeds.
    """
    if ctx.rational is None or not _is_supported_speed(ctx.rational):
        raise ValueError("parity_sum supports speeds 1/2 and k/(2k+1), k even")
    win = ctx.eval_window(thr)
    if win is None:
        return 0.0
    lo, hi = win
    ns = np.arange(max(lo, 1), hi + 1, dtype=np.int64)
    if ns.size == 0:
        return 0.0
    zn = ctx.z_n(ns)
    kk = np.floor(zn)
    odd = ((ns - kk.astype(np.int64)) & 1) == 1
    if not odd.any():
        return 0.0
    return kahan_sum(heat_kernel_dx(ns[odd].astype(np.float64) / 2.0, zn[odd]))


def v_minus_w(ctx: ProbeContext, thr: float = EXP_THRESHOLD) -> float:
    """Probe minus surrogate; decomposes as 2*parity_sum + fast remainder."""
    return v_probe(ctx, thr) - w_probe(ctx, thr)


# ---------------------------------------------------------------------------
# closed-form difference of surrogates at perturbed speed

def _frac_arg_breaks(fn_arg: Callable[[float], float], a: float, b: float,
                     slope: float) -> List[float]:
    """tau where fn_arg crosses integers; fn_arg affine with given slope."""
    if slope == 0.0:
        return []
    va, vb = fn_arg(a), fn_arg(b)
    lo, hi = (va, vb) if va < vb else (vb, va)
    out = []
    for m in range(int(math.floor(lo)) + 1, int(math.ceil(hi))):
        t = a + (m - va) / slope
        if a < t < b:
            out.append(t)
    return sorted(out)


def w_diff_closed_form(x: float, xi: float, params: ResonanceParams,
                       tau_cut: float = 3.0, nodes: int = 12) -> float:
    """Surrogate difference w(lam) - w(lam_tilde) from the leading closed form.

    Evaluates 2/lam - 2/lam_tilde minus the Gaussian-weighted fractional-part
    integral with the pinned coefficient (1/q) sqrt(2/(pi lam_t y)); the
    integral runs over |tau| < tau_cut * y^delta and is split at the
    integer crossings of its staircase argument.  Doubling the node count
    must reproduce the value to 1e-10 (raises otherwise).
    """
    if x >= 0:
        raise ValueError("x must be negative")
    lam = params.lam.value
    lamt = params.lam_tilde.value
    q = params.lam.q
    eps = params.epsilon
    y = -x
    T = tau_cut * y ** params.delta
    sqy = math.sqrt(y)

    def arg(tau):
        return q * xi + q * y - (q * eps / lamt) * (y - tau * math.sqrt(y / lamt))

    slope = (q * eps / lamt) * math.sqrt(y / lamt)
    breaks = _frac_arg_breaks(arg, -T, T, slope)

    def integrand(taus: np.ndarray) -> np.ndarray:
        a = (q * xi + q * y
             - (q * eps / lamt) * (y - taus * math.sqrt(y / lamt)))
        return taus * np.exp(-taus * taus / 2.0) * (a - np.floor(a))

    coeff = (1.0 / q) * math.sqrt(2.0 / (math.pi * lamt * y))
    base = 2.0 / lam - 2.0 / lamt
    val = base - coeff * gauss_panels(integrand, -T, T, breaks, nodes=nodes)
    val2 = base - coeff * gauss_panels(integrand, -T, T, breaks, nodes=2 * nodes)
    if abs(val2 - val) > 1e-10:
        from .errors import QuadratureError
        raise QuadratureError("tau-quadrature failed to converge")
    return val2


def technical_lhs_rhs(z: float, params: ResonanceParams,
                      thr: float = EXP_THRESHOLD) -> Tuple[float, float]:
    """Block sum versus integral form of the perturbed fractional-weighted trace.

    lhs: sum_m G_x(m q/2, z + lam_t m q) * sum_{j=1..q} ((z + m q eps + lam_t j)),
    rhs: integral G_x(s q/2, z + lam_t s q) * ((q (z + s q eps))) ds over s > 0.
    """
    if z >= -50.0:
        raise ValueError("probe must sit well downstream (z < -50)")
    lamt = params.lam_tilde.value
    q = params.lam.q
    eps = params.epsilon

    win = kernel_sum_window(z, lamt, thr=thr)
    if win is None:
        return 0.0, 0.0
    n_lo, n_hi = win
    m_lo = max(0, n_lo // q)
    m_hi = n_hi // q + 1

    ms = np.arange(m_lo, m_hi + 1, dtype=np.float64)
    ts = ms * q / 2.0
    ts[ts == 0.0] = 1e-30
    gx = heat_kernel_dx(ts, z + lamt * q * ms)
    fr = np.zeros_like(ms)
    for j in range(1, q + 1):
        a = z + ms * q * eps + lamt * j
        fr += a - np.floor(a)
    lhs = kahan_sum(gx * fr)

    s_lo, s_hi = m_lo, m_hi

    def arg(s):
        return q * (z + s * q * eps)

    slope = q * q * eps
    breaks = _frac_arg_breaks(arg, s_lo, s_hi, slope)

    def integrand(ss: np.ndarray) -> np.ndarray:
        tt = np.maximum(ss * q / 2.0, 1e-30)
        a = q * (z + ss * q * eps)
        return heat_kernel_dx(tt, z + lamt * q * ss) * (a - np.floor(a))

    rhs = gauss_panels(integrand, float(s_lo), float(s_hi), breaks, nodes=10)
    return lhs, rhs
