"""Second component of the profile pair via the discrete Green's kernel.

Two independent evaluation routes for the same object:

* `V_lambda` - the double Duhamel sum  sum_n sum_k H(x - k + lam*n) K[n-1, k],
* `V_via_integral` - the probe representation
  -1/2 * integral of psi(xi) * v(x; xi) d xi,
  where `v_probe` is the two-offset kernel trace
  v(x; xi) = sum_n (K[n-1, [[x + lam n - xi]]] + K[n-1, [[x + lam n - xi]] + 1]).

Their agreement is a genuine cross-check: the first route consumes the
window average H, the second the density psi, and they meet only through
the analytic identity connecting them.

All n-sums run over certified windows (see `windows`); v(x; xi) is constant
in xi between the staircase breakpoints xi in x + (1/q)Z, so the xi-panels
for Gauss-Legendre are split there and at the density's own breakpoints,
making the panel integrands analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import QuadratureError
from .kernels import binom_kernel, binom_kernel_many
from .quadrature import gauss_panels, panel_points
from .scalar_profile import RationalSpeed, ScalarDSP, SourceProfile, WindowAverage
from .summation import kahan_sum
from .windows import EXP_THRESHOLD, kernel_sum_window, paper_interval

__all__ = [
    "ProbeContext",
    "GridFunction",
    "SecondComponent",
    "duhamel_sum",
    "v_probe",
    "V_lambda",
    "V_via_integral",
    "dsp2_residual",
    "build_second_component",
]


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class ProbeContext:
    """Evaluation context of a probe kernel at position x, source offset xi.

    z = x - xi + lam and z_n = x + lam*(n+1) - xi = z + lam*n; the analysis
    interval I(|z|; lam, delta) is exposed for diagnostics, while sums use
    the wider certified window.
    """

    x: float
    xi: float
    speed: float
    delta: float = 0.1
    rational: Optional[RationalSpeed] = None

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ValueError("speed must be positive")
        if not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")

    @property
    def z(self) -> float:
        return self.x - self.xi + self.speed

    def z_n(self, n) -> np.ndarray:
        return self.z + self.speed * np.asarray(n, dtype=np.float64)

    @property
    def window(self) -> Optional[Tuple[float, float]]:
        """Analysis interval I(|z|; lam, delta); None when z >= 0 (upstream)."""
        if self.z >= 0:
            return None
        return paper_interval(-self.z, self.speed, self.delta)

    def eval_window(self, thr: float = EXP_THRESHOLD) -> Optional[Tuple[int, int]]:
        win = kernel_sum_window(self.z, self.speed, thr=thr)
        if win is None:
            return None
        lo, hi = win
        pw = self.window
        if pw is not None:
            lo = min(lo, max(0, int(math.floor(pw[0]))))
            hi = max(hi, int(math.ceil(pw[1])))
        return lo, hi


@dataclass
class GridFunction:
    """Real samples on a uniform 1-d grid."""

    start: float
    step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.step <= 0:
            raise ValueError("step must be positive")
        self.values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @property
    def xs(self) -> np.ndarray:
        return self.start + self.step * np.arange(len(self.values))

    def __call__(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=np.float64), self.xs, self.values)


@dataclass
class SecondComponent:
    """Second-component profile with its construction inputs and certificate."""

    profile: GridFunction
    speed: RationalSpeed
    source: SourceProfile
    delta: float
    truncation_certificate: float
    quad_nodes: int = 8

    def __call__(self, x) -> float:
        """Pointwise re-evaluation through the integral route (exact at any x)."""
        return V_via_integral(float(x), self.source, self.speed, self.delta,
                              quad_nodes=self.quad_nodes, verify=False)


# ---------------------------------------------------------------------------
# operations

def duhamel_sum(sources: Dict[Tuple[int, int], float], n: int, j: int,
                start: int = 0) -> float:
    """Superpose finitely many point sources through the kernel.

    sources maps (m, j) to the forcing applied at time level m, cell j;
    the result is the solution value at (n, j) with vanishing data at
    time `start` (sources at levels start-1 .. n-1 act).
    """
    acc = []
    for (m, jj), s in sorted(sources.items()):
        if s == 0.0 or not (start - 1 <= m <= n - 1):
            continue
        acc.append(s * binom_kernel(n - 1 - m, j - jj))
    return kahan_sum(acc)


def v_probe(ctx: ProbeContext, thr: float = EXP_THRESHOLD) -> float:
    """Windowed two-offset kernel trace; pairs summed per n, ascending n."""
    win = ctx.eval_window(thr)
    if win is None:
        return 0.0
    lo, hi = win
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    zn = ctx.z_n(ns)
    kk = np.floor(zn).astype(np.int64)
    pair = binom_kernel_many(ns, kk) + binom_kernel_many(ns, kk + 1)
    return kahan_sum(pair)


def _lattice_breaks(x: float, q: int, a: float, b: float) -> list:
    """Points of x + (1/q)Z inside (a, b): the xi-jumps of the probe trace."""
    stepq = 1.0 / q
    first = a + ((x - a) % stepq)
    out = []
    t = first
    while t < b:
        if a < t < b:
            out.append(t)
        t += stepq
    return out


def V_via_integral(
    x: float,
    src: SourceProfile,
    lam: RationalSpeed,
    delta: float = 0.1,
    quad_nodes: int = 8,
    verify: bool = True,
    verify_tol: float = 1e-8,
) -> float:
    """-1/2 * integral psi(xi) v(x; xi) dxi by breakpoint-split Gauss-Legendre.

    With `verify=True` the node count is doubled once and the two results
    must agree within `verify_tol`.
    """
    a, b = src.support
    if b <= a:
        return 0.0
    breaks = list(src.breakpoints) + _lattice_breaks(x, lam.q, a, b)

    def integrand(xis: np.ndarray) -> np.ndarray:
        dens = src.density(xis)
        vv = np.array([
            v_probe(ProbeContext(x, float(xi), lam.value, delta, rational=lam))
            for xi in xis
        ])
        return dens * vv

    val = -0.5 * gauss_panels(integrand, a, b, breaks, nodes=quad_nodes)
    if verify:
        val2 = -0.5 * gauss_panels(integrand, a, b, breaks, nodes=2 * quad_nodes)
        if abs(val2 - val) > verify_tol:
            raise QuadratureError(
                f"node-doubling changed V({x}) by {abs(val2 - val):.3e}")
        return val2
    return val


def V_lambda(x: float, H: WindowAverage, lam: RationalSpeed,
             delta: float = 0.1, thr: float = EXP_THRESHOLD) -> float:
    """Duhamel double sum with the window average H as the source."""
    a, b = H.support
    if b <= a:
        return 0.0
    mid = 0.5 * (a + b)
    halfwidth = 0.5 * (b - a)
    win = kernel_sum_window(x + lam.value - mid, lam.value, thr=thr,
                            pad=8 + int(math.ceil(halfwidth)))
    if win is None:
        return 0.0
    lo, hi = win
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    base = x + lam.value * (ns + 1).astype(np.float64)
    # k must satisfy base - k in (a, b) and share parity with n
    k_lo = np.ceil(base - b).astype(np.int64)
    n_offsets = int(math.floor(b - a)) + 2
    contribs = []
    for moff in range(n_offsets):
        kk = k_lo + moff
        harg = base - kk.astype(np.float64)
        ker = binom_kernel_many(ns, kk)
        hval = np.where((harg > a) & (harg < b), H(harg), 0.0)
        contribs.append(ker * hval)
    stacked = np.stack(contribs, axis=1).ravel()  # n-major fixed order
    return kahan_sum(stacked)


def dsp2_residual(U: ScalarDSP, V: SecondComponent, g: Callable) -> float:
    """Sup-norm defect of the second profile equation on V's sample grid."""
    if abs(U.speed.value - V.speed.value) > 1e-15:
        raise ValueError("profiles must share one speed")
    lam = V.speed.value
    xs = V.profile.xs
    lo = xs[0] + 1.0 + lam
    hi = xs[-1] - 1.0
    xq = xs[(xs >= lo) & (xs <= hi)]
    if xq.size == 0:
        return 0.0
    worst = 0.0
    for x in xq:
        vp1 = V(float(x + 1.0))
        vm1 = V(float(x - 1.0))
        vshift = V(float(x - lam))
        gp = float(np.asarray(g(U(np.array([x + 1.0]))))[0])
        gm = float(np.asarray(g(U(np.array([x - 1.0]))))[0])
        res = abs(vshift - 0.5 * (vp1 + vm1) + 0.5 * (gp - gm))
        worst = max(worst, res)
    return worst


def build_second_component(
    src: SourceProfile,
    lam: RationalSpeed,
    x_start: float,
    x_stop: float,
    step: float,
    delta: float = 0.1,
    quad_nodes: int = 8,
) -> SecondComponent:
    """Tabulate V on a uniform grid through the integral route."""
    if step <= 0 or x_stop <= x_start:
        raise ValueError("need x_start < x_stop and positive step")
    n = int(math.floor((x_stop - x_start) / step + 1e-12))
    xs = x_start + step * np.arange(n + 1)
    # verify quadrature once at each end, then run the fast path
    V_via_integral(float(xs[0]), src, lam, delta, quad_nodes, verify=True)
    V_via_integral(float(xs[-1]), src, lam, delta, quad_nodes, verify=True)
    vals = np.array([
        V_via_integral(float(x), src, lam, delta, quad_nodes, verify=False)
        for x in xs
    ])
    cert = math.exp(-EXP_THRESHOLD)
    grid = GridFunction(start=float(xs[0]), step=step, values=vals)
    return SecondComponent(profile=grid, speed=lam, source=src, delta=delta,
                           truncation_certificate=cert, quad_nodes=quad_nodes)
