"""Downstream variation of profile-pair differences across nearby speeds.

For the speed family 1/2 versus k/(2k+1) (k even, eps_k = -1/(4k+2)) this
module samples Delta V(x) = V at speed 1/2 minus V at the perturbed speed
over the resonance window J(eps) with |x| ~ |eps|^(-2/(1+2*delta)), measures
its grid total variation, evaluates the oscillation-point diagnostics
(alternation of the Gaussian-weighted fractional-part integral H0), and
compares the direct construction against the closed-form surrogate.

The primary total-variation path is always the exact discrete construction
(`delta_V` through the probe-kernel integral); the surrogate is a
cross-check only.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .approx_analysis import ResonanceParams
from .dsp_construct import V_via_integral
from .quadrature import adaptive_simpson, gauss_panels
from .scalar_profile import SourceProfile
from .summation import kahan_sum

__all__ = [
    "SpeedFamily",
    "OscillationGrid",
    "VariationReport",
    "oscillation_points",
    "H0_eval",
    "delta_V",
    "delta_V_surrogate",
    "tv_on_grid",
    "run_study",
    "far_window_tv",
    "translation_check",
]


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class SpeedFamily:
    """Even-k family of perturbed speeds with shared delta."""

    k_list: Tuple[int, ...]
    delta: float = 0.1

    def __post_init__(self) -> None:
        if not self.k_list:
            raise ValueError("k_list must be nonempty")
        for k in self.k_list:
            if k < 2 or k % 2 != 0:
                raise ValueError("every k must be even and >= 2")

    def params(self, k: int) -> ResonanceParams:
        return ResonanceParams(k=k, delta=self.delta)


@dataclass(frozen=True)
class OscillationGrid:
    """Alternation probe points y_1..y_L with exact phase bookkeeping."""

    y_points: Tuple[float, ...]
    parities: Tuple[str, ...]       # "odd" / "even"
    window: Tuple[float, float]     # J(eps) in y = -x
    beta_y_frac: Tuple[Fraction, ...]  # exact ((beta * y_n))


@dataclass
class VariationReport:
    """Per-k outcome of the variation study."""

    k: int
    epsilon: float
    window: Tuple[float, float]
    sample_step: float
    tv_value: float
    A_term: float
    alternation: List[Tuple[float, str, float]]  # (y_n, parity, H0)
    runtime_s: float
    status: str = "ok"

    def __post_init__(self) -> None:
        if self.status == "ok" and self.tv_value < 0:
            raise ValueError("total variation cannot be negative")


# ---------------------------------------------------------------------------
# oscillation points and the H0 integral

def oscillation_points(params: ResonanceParams, count: int) -> OscillationGrid:
    """First `count` alternation points, exact in rational arithmetic.

    y_1 = floor(|eps|^(-2/(1+2d)))/beta and
    y_n = y_1 + (n*floor(|eps|^(-1/(1+2d))) + (n+1)/2)/beta for n >= 2,
    which pins ((beta*y_n)) to 0 for odd n and 1/2 for even n.
    """
    d = params.delta
    aeps = abs(params.epsilon)
    M2 = int(math.floor(aeps ** (-2.0 / (1.0 + 2.0 * d))))
    M1 = int(math.floor(aeps ** (-1.0 / (1.0 + 2.0 * d))))
    if count < 1:
        raise ValueError("count must be positive")
    if count > M1:
        raise ValueError(f"count exceeds the available {M1} points for k={params.k}")
    beta = params.beta_fraction
    y1 = Fraction(M2) / beta
    ys: List[Fraction] = [y1]
    for n in range(2, count + 1):
        ys.append(y1 + Fraction(2 * n * M1 + n + 1, 2) / beta)
    fracs = tuple((beta * y) % 1 for y in ys)
    parities = tuple("odd" if n % 2 == 1 else "even" for n in range(1, count + 1))
    e2 = aeps ** (-2.0 / (1.0 + 2.0 * d))
    return OscillationGrid(
        y_points=tuple(float(y) for y in ys),
        parities=parities,
        window=(e2 / 2.0, e2),
        beta_y_frac=fracs,
    )


def H0_eval(y: float, params: ResonanceParams, cutoff: float,
            tol: float = 1e-12) -> float:
    """Gaussian-weighted fractional-part integral at the Dirac limit.

    integral over |tau| < cutoff * y^delta of
    tau * exp(-tau^2/2) * ((beta*y + gamma*eps*sqrt(y)*tau)) d tau,
    by adaptive Simpson split at the integer crossings of the argument.
    """
    if y <= 0:
        raise ValueError("y must be positive")
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    beta = params.beta
    slope = params.gamma * params.epsilon * math.sqrt(y)
    T = cutoff * y ** params.delta

    def arg(tau: float) -> float:
        return beta * y + slope * tau

    breaks: List[float] = []
    if slope != 0.0:
        va, vb = arg(-T), arg(T)
        lo, hi = (va, vb) if va < vb else (vb, va)
        for m in range(int(math.floor(lo)) + 1, int(math.ceil(hi))):
            t = (-T) + (m - va) / slope
            if -T < t < T:
                breaks.append(t)

    def f(tau: float) -> float:
        a = arg(tau)
        return tau * math.exp(-tau * tau / 2.0) * (a - math.floor(a))

    return adaptive_simpson(f, -T, T, breakpoints=sorted(breaks), tol=tol)


def lemma_cutoff(params: ResonanceParams, y: float, parity: str) -> float:
    """Per-point cutoff constant: one (half) staircase period inside the window."""
    c = 1.0 / (params.gamma * abs(params.epsilon) * y ** (params.delta + 0.5))
    return c / 2.0 if parity == "even" else c


# ---------------------------------------------------------------------------
# profile difference and its surrogate

def delta_V(x: float, src: SourceProfile, params: ResonanceParams,
            quad_nodes: int = 8, verify: bool = False) -> float:
    """Direct-construction difference of second components at the two speeds."""
    v_base = V_via_integral(x, src, params.lam, params.delta,
                            quad_nodes=quad_nodes, verify=verify)
    v_pert = V_via_integral(x, src, params.lam_tilde, params.delta,
                            quad_nodes=quad_nodes, verify=verify)
    return v_base - v_pert


def _density_moment_prefixes(src: SourceProfile) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs = src.xs
    v = src.values
    p0 = np.concatenate([[0.0], np.cumsum(0.5 * src.step * (v[1:] + v[:-1]))])
    xv = xs * v
    p1 = np.concatenate([[0.0], np.cumsum(0.5 * src.step * (xv[1:] + xv[:-1]))])
    return xs, p0, p1


def delta_V_surrogate(x: float, src: SourceProfile, params: ResonanceParams,
                      tau_cut: float = 3.0, nodes: int = 12) -> float:
    """Closed-form surrogate A(eps) + pinned-coefficient oscillation integral.

    A(eps) = -(eps/(lam*lam_t)) * mass; the oscillation term couples the
    density through h(tau) = integral psi(xi) ((2 xi + beta y + gamma eps
    sqrt(y) tau)) d xi, evaluated exactly from prefix integrals of psi and
    xi*psi; the pinned coefficient is (1/q) sqrt(2/(pi lam_t y)) / 2.
    """
    if x >= 0:
        raise ValueError("x must be negative")
    y = -x
    lam = params.lam.value
    lamt = params.lam_tilde.value
    q = params.lam.q
    eps = params.epsilon
    beta = params.beta
    gamma = params.gamma
    A = -(eps / (lam * lamt)) * src.mass

    xs, p0, p1 = _density_moment_prefixes(src)
    a_s, b_s = src.support
    mass = p0[-1]

    def P0(t):
        return np.interp(t, xs, p0, left=0.0, right=mass)

    def P1(t):
        return np.interp(t, xs, p1, left=0.0, right=p1[-1])

    def h_of(tau: float) -> float:
        # integral of psi(xi) * ((2 xi + R)) over the support, piecewise exact
        R = beta * y + gamma * eps * math.sqrt(y) * tau
        lo_a, hi_a = 2.0 * a_s + R, 2.0 * b_s + R
        cuts = [a_s]
        for m in range(int(math.floor(lo_a)) + 1, int(math.ceil(hi_a))):
            t = (m - R) / 2.0
            if a_s < t < b_s:
                cuts.append(t)
        cuts.append(b_s)
        acc = 0.0
        for lo2, hi2 in zip(cuts[:-1], cuts[1:]):
            mfloor = math.floor(2.0 * (0.5 * (lo2 + hi2)) + R)
            acc += (2.0 * (P1(hi2) - P1(lo2))
                    + (R - mfloor) * (P0(hi2) - P0(lo2)))
        return acc

    slope = gamma * eps * math.sqrt(y)
    T = tau_cut * y ** params.delta
    # tau-kinks: support edges crossing integers
    breaks: List[float] = []
    for edge in (2.0 * a_s, 2.0 * b_s):
        va = edge + beta * y + slope * (-T)
        vb = edge + beta * y + slope * T
        lo2, hi2 = (va, vb) if va < vb else (vb, va)
        for m in range(int(math.floor(lo2)) + 1, int(math.ceil(hi2))):
            t = (-T) + (m - va) / slope if slope else None
            if t is not None and -T < t < T:
                breaks.append(t)

    def integrand(taus: np.ndarray) -> np.ndarray:
        return np.array([t * math.exp(-t * t / 2.0) * h_of(float(t)) for t in taus])

    coeff = 0.5 * (1.0 / q) * math.sqrt(2.0 / (math.pi * lamt * y))
    osc = gauss_panels(integrand, -T, T, sorted(breaks), nodes=nodes)
    return A + coeff * osc


# ---------------------------------------------------------------------------
# grid total variation

def tv_on_grid(fn: Callable[[float], float], interval: Tuple[float, float],
               step: float) -> float:
    """Sum of |increments| of fn over the uniform grid spanning `interval`."""
    a, b = interval
    if not (a < b and step > 0):
        raise ValueError("need a < b and positive step")
    n = int(math.floor((b - a) / step + 1e-12))
    xs = a + step * np.arange(n + 1)
    if xs[-1] < b - 1e-9 * step:
        xs = np.append(xs, b)
    vals = np.array([fn(float(x)) for x in xs])
    return float(np.abs(np.diff(vals)).sum())


# ---------------------------------------------------------------------------
# the study

def _study_single(args) -> VariationReport:
    (k, delta, src, quad_nodes, alternation_count, h0_tol) = args
    t0 = time.perf_counter()
    params = ResonanceParams(k=k, delta=delta)
    aeps = abs(params.epsilon)
    e2 = aeps ** (-2.0 / (1.0 + 2.0 * delta))
    M1 = int(math.floor(aeps ** (-1.0 / (1.0 + 2.0 * delta))))
    spacing = (M1 + 0.5) / params.beta
    step = min(1.0, spacing / 20.0)
    window_y = (e2 / 2.0, e2)

    # one verified evaluation per speed, then the fast path
    V_via_integral(-window_y[0], src, params.lam, delta,
                   quad_nodes=quad_nodes, verify=True)
    V_via_integral(-window_y[0], src, params.lam_tilde, delta,
                   quad_nodes=quad_nodes, verify=True)

    tv = tv_on_grid(lambda x: delta_V(x, src, params, quad_nodes=quad_nodes),
                    (-window_y[1], -window_y[0]), step)

    count = min(alternation_count, M1)
    grid = oscillation_points(params, count)
    alternation = []
    for y, parity in zip(grid.y_points, grid.parities):
        c = lemma_cutoff(params, y, parity)
        alternation.append((y, parity, H0_eval(y, params, c, tol=h0_tol)))

    A = -(params.epsilon / (params.lam.value * params.lam_tilde.value)) * src.mass
    return VariationReport(
        k=k, epsilon=params.epsilon, window=window_y, sample_step=step,
        tv_value=tv, A_term=A, alternation=alternation,
        runtime_s=time.perf_counter() - t0,
    )


def run_study(
    family: SpeedFamily,
    src: SourceProfile,
    delta: float = 0.1,
    quad_nodes: int = 8,
    alternation_count: int = 10,
    h0_tol: float = 1e-12,
    workers: int = 1,
) -> List[VariationReport]:
    """Per-k variation reports; failures are isolated into failed reports."""
    if src.mass == 0.0:
        raise ValueError("source mass must be nonzero")
    a, b = src.support
    if b - a > 0.25 + 1e-12:
        raise ValueError("source support width must not exceed 0.25")
    if delta != family.delta:
        family = SpeedFamily(family.k_list, delta)

    jobs = [(k, delta, src, quad_nodes, alternation_count, h0_tol)
            for k in family.k_list]
    reports: List[VariationReport] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = list(pool.map(_study_single_safe, jobs))
        reports = list(futs)
    else:
        reports = [_study_single_safe(j) for j in jobs]
    return reports


def _study_single_safe(args) -> VariationReport:
    k = args[0]
    try:
        return _study_single(args)
    except Exception as exc:  # isolate per-k failures
        params = ResonanceParams(k=k, delta=args[1])
        return VariationReport(
            k=k, epsilon=params.epsilon, window=(0.0, 0.0), sample_step=0.0,
            tv_value=0.0, A_term=0.0, alternation=[], runtime_s=0.0,
            status=f"failed: {exc}",
        )


def far_window_tv(params: ResonanceParams, src: SourceProfile,
                  quad_nodes: int = 8) -> float:
    """Control total variation far beyond the resonance window: y in [10, 11]*e2."""
    delta = params.delta
    aeps = abs(params.epsilon)
    e2 = aeps ** (-2.0 / (1.0 + 2.0 * delta))
    M1 = int(math.floor(aeps ** (-1.0 / (1.0 + 2.0 * delta))))
    step = min(1.0, ((M1 + 0.5) / params.beta) / 20.0)
    return tv_on_grid(lambda x: delta_V(x, src, params, quad_nodes=quad_nodes),
                      (-11.0 * e2, -10.0 * e2), step)


def translation_check(V, dx: float, x_max: float = -100.0) -> float:
    """sup over sampled x <= x_max of |V(x+dx) - V(x)| * |x|^(1-delta)."""
    if not 0.0 <= dx <= 2.0:
        raise ValueError("dx must lie in [0, 2]")
    if dx == 0.0:
        return 0.0
    xs = V.profile.xs
    xs = xs[xs <= x_max]
    worst = 0.0
    for x in xs:
        d = abs(V(float(x + dx)) - V(float(x))) * abs(x) ** (1.0 - V.delta)
        worst = max(worst, d)
    return worst
