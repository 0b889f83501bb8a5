"""Binomial Green's kernel, heat kernel, fractional parts, sawtooth family.

The discrete Green's function of the three-point averaging scheme
``z_{n+1,j} = (z_{n,j+1} + z_{n,j-1}) / 2`` is

    K[n, k] = 2^-n * C(n, (n-k)/2)   for k = -n, -n+2, ..., n,  else 0.

Evaluation strategy (per-value relative error budget ~1e-13 in the
numerically significant regime k^2/(2n) <= 45):

* n <= 60, or small tail index with n <= 1024: exact integer binomial,
  converted by one correctly-rounded float division, then an exact ldexp.
* otherwise: a cancellation-free Stirling-series form of log K.  The naive
  difference of three log-gammas loses ~|lgamma| * eps absolute accuracy,
  which is 1e-11 at n = 1e4; the grouped form below keeps every term of
  size O(k^2/n) + O(log n), so the error stays at a few 1e-15.

Row evaluation (`kernel_row`) anchors at the exactly-computed central value
and walks outward with the ratio recurrence, which keeps the row sum within
~sqrt(n) * eps of 1.

Integer-part convention, fixed package-wide: ``[[a]] = floor(a)`` for every
real ``a`` (also for negatives), and ``((a)) = a - floor(a)``.  The floor
convention is load-bearing: the fractional-sum identity used by the speed
perturbation analysis fails for truncate-toward-zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import List, Tuple

import numpy as np

from .summation import kahan_sum

__all__ = [
    "LatticeIndex",
    "KernelSample",
    "SawtoothFamily",
    "binom_kernel",
    "binom_kernel_many",
    "kernel_row",
    "kernel_row_arrays",
    "kernel_sample",
    "heat_kernel",
    "heat_kernel_deriv",
    "heat_kernel_dx",
    "frac",
    "sawtooth",
    "sawtooth_family",
]

_LN2 = math.log(2.0)
_EXACT_N = 60          # full rows by exact integer arithmetic up to here
_EXACT_TAIL_J = 20     # below this tail index the Stirling series degrades
_EXACT_TAIL_N = 1024   # ... so use exact integers, which stay affordable here


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class LatticeIndex:
    """Space-time index (n, k) of the kernel; support needs n+k even, |k| <= n."""

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("time index n must be nonnegative")

    @property
    def in_support(self) -> bool:
        return abs(self.k) <= self.n and (self.n + self.k) % 2 == 0


@dataclass(frozen=True)
class KernelSample:
    """Kernel value at an index together with its local-CLT surrogate 2*G(n/2, k)."""

    index: LatticeIndex
    value: float
    clt_value: float
    abs_error: float


@dataclass(frozen=True)
class SawtoothFamily:
    """Orders 1..m of the zero-mean periodic sawtooth chain h_m' = h_{m-1}.

    `anchors[j-1]` is the smallest zero of h_j in [0, 1); writing
    h_j(t) = integral of h_{j-1} from the anchor pins the additive constant
    that the zero-mean normalization otherwise leaves implicit.
    """

    order: int
    anchors: Tuple[float, ...]


# ---------------------------------------------------------------------------
# binomial kernel

def _stirling_tail(x: float) -> float:
    # log Gamma correction series; error < 1.6e-15 for x >= 20
    x2 = x * x
    return ((1.0 / 12.0) / x - (1.0 / 360.0) / (x * x2)
            + (1.0 / 1260.0) / (x2 * x2 * x) - (1.0 / 1680.0) / (x2 * x2 * x2 * x))


def _log_kernel_stirling(n: float, k: float, j: float, m: float) -> float:
    th = k / n
    return (-((n + 1.0) / 2.0) * math.log1p(-th * th) - k * math.atanh(th)
            + _LN2 - 0.5 * math.log(2.0 * math.pi * n)
            + _stirling_tail(n) - _stirling_tail(j) - _stirling_tail(m))


def binom_kernel(n: int, k: int) -> float:
    """Kernel value K[n, k]; exactly 0 off the parity sublattice."""
    n = int(n)
    k = int(k)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if abs(k) > n or (n + k) % 2 != 0:
        return 0.0
    k = -abs(k)                      # symmetric in k; canonical side
    j = (n - k) >> 1                 # j >= n/2 on this side
    jt = n - j                       # tail index, jt <= n/2
    if n <= _EXACT_N or (jt < _EXACT_TAIL_J and n <= _EXACT_TAIL_N):
        return math.ldexp(float(comb(n, jt)), -n)
    if jt >= _EXACT_TAIL_J:
        return math.exp(_log_kernel_stirling(float(n), float(abs(k)), float(jt), float(j)))
    # gigantic n with a tiny tail index: value is far below underflow
    lg = (math.lgamma(n + 1.0) - math.lgamma(jt + 1.0) - math.lgamma(j + 1.0)
          - n * _LN2)
    return math.exp(lg)


def binom_kernel_many(n, k) -> np.ndarray:
    """Vectorized `binom_kernel` over broadcastable integer arrays."""
    n = np.asarray(n, dtype=np.int64)
    k = np.asarray(k, dtype=np.int64)
    n, k = np.broadcast_arrays(n, k)
    out = np.zeros(n.shape, dtype=np.float64)
    ok = (n >= 0) & (np.abs(k) <= n) & (((n + k) & 1) == 0)
    if not ok.any():
        return out
    nn = n[ok]
    kk = np.abs(k[ok])
    jt = (nn - kk) >> 1              # tail index <= n/2
    jb = nn - jt
    vals = np.empty(nn.shape, dtype=np.float64)
    exact = (nn <= _EXACT_N) | ((jt < _EXACT_TAIL_J) & (nn <= _EXACT_TAIL_N))
    if exact.any():
        vals[exact] = [
            math.ldexp(float(comb(int(a), int(b))), -int(a))
            for a, b in zip(nn[exact], jt[exact])
        ]
    big = ~exact
    if big.any():
        deep = big & (jt < _EXACT_TAIL_J)     # huge n, tiny tail: below underflow
        if deep.any():
            vals[deep] = 0.0
            big = big & ~deep
        nb = nn[big].astype(np.float64)
        kb = kk[big].astype(np.float64)
        jtb = jt[big].astype(np.float64)
        jbb = jb[big].astype(np.float64)
        th = kb / nb
        lnk = (-((nb + 1.0) / 2.0) * np.log1p(-th * th) - kb * np.arctanh(th)
               + _LN2 - 0.5 * np.log(2.0 * np.pi * nb)
               + _stirling_tail(nb) - _stirling_tail(jtb) - _stirling_tail(jbb))
        vals[big] = np.exp(lnk)
    out[ok] = vals
    return out


class _CenterCache:
    """Exact central binomials C(n, n//2), extended incrementally.

    Each step multiplies by a small rational, so extending to n costs
    O(n * digits) integer work total; used by `kernel_row`.
    """

    def __init__(self) -> None:
        self._vals = [1]  # C(0, 0)

    def get(self, n: int) -> int:
        vals = self._vals
        while len(vals) <= n:
            m = len(vals)            # computing C(m, m//2)
            prev = vals[m - 1]
            half = m // 2
            if m % 2 == 1:           # C(2a+1, a) = C(2a, a) * (2a+1)/(a+1)
                vals.append(prev * m // (half + 1))
            else:                    # C(2a, a) = C(2a-1, a-1) * (2a)/a
                vals.append(prev * m // half)
        return vals[n]


_CENTERS = _CenterCache()


def kernel_row_arrays(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """(k, value) arrays over the support k = -n, -n+2, ..., n."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return np.array([0]), np.array([1.0])
    if n <= _EXACT_N:
        js = np.arange(n + 1)
        vs = np.array([math.ldexp(float(comb(n, int(j))), -n) for j in js])
    else:
        jc = n // 2
        vc = _CENTERS.get(n) / (1 << n)   # correctly rounded
        up_j = np.arange(jc + 1, n + 1, dtype=np.float64)
        up = vc * np.cumprod((n - up_j + 1.0) / up_j)
        dn_j = np.arange(jc - 1, -1, -1, dtype=np.float64)
        dn = vc * np.cumprod((dn_j + 1.0) / (n - dn_j))
        vs = np.concatenate([dn[::-1], [vc], up])
    ks = n - 2 * np.arange(n + 1)         # descending in k as j ascends
    return ks[::-1].copy(), vs[::-1].copy()


def kernel_row(n: int) -> List[Tuple[int, float]]:
    """Kernel row as (k, value) pairs, k ascending; values sum to 1."""
    ks, vs = kernel_row_arrays(n)
    return [(int(k), float(v)) for k, v in zip(ks, vs)]


def kernel_sample(n: int, k: int) -> KernelSample:
    """Kernel value paired with its heat-kernel surrogate at the same index."""
    idx = LatticeIndex(n, k)
    value = binom_kernel(n, k)
    clt = 2.0 * heat_kernel(n / 2.0, float(k)) if n >= 1 else float("nan")
    return KernelSample(idx, value, clt, abs(value - clt))


# ---------------------------------------------------------------------------
# heat kernel

def heat_kernel(t: float, x: float) -> float:
    """G(t, x) = exp(-x^2/(4t)) / (2 sqrt(pi t)) for t > 0."""
    if t <= 0:
        raise ValueError("t must be positive")
    return math.exp(-x * x / (4.0 * t)) / (2.0 * math.sqrt(math.pi * t))


def heat_kernel_dx(t, x):
    """First space derivative, vectorized; hot path of the probe sums."""
    t = np.asarray(t, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return -(x / (2.0 * t)) * np.exp(-x * x / (4.0 * t)) / (2.0 * np.sqrt(np.pi * t))


def _hermite_eval(m: int, y: float) -> float:
    # physicists' Hermite by recurrence
    h0, h1 = 1.0, 2.0 * y
    if m == 0:
        return h0
    for i in range(1, m):
        h0, h1 = h1, 2.0 * y * h1 - 2.0 * i * h0
    return h1


def heat_kernel_deriv(t: float, x: float, m: int, axis: str = "space") -> float:
    """m-th partial derivative of G along `axis` ("space" or "time").

    Space derivatives use the closed Hermite form
    d^m/dx^m G = (-1)^m (2 sqrt(t))^-m H_m(x / (2 sqrt(t))) G(t, x);
    time derivatives reduce to space ones through G_t = G_xx.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if m < 1:
        raise ValueError("derivative order must be >= 1")
    if axis == "time":
        m, axis = 2 * m, "space"
    if axis != "space":
        raise ValueError("axis must be 'space' or 'time'")
    s = 2.0 * math.sqrt(t)
    sign = -1.0 if m % 2 else 1.0
    return sign * _hermite_eval(m, x / s) / s ** m * heat_kernel(t, x)


# ---------------------------------------------------------------------------
# fractional part and sawtooth chain

def frac(a: float) -> float:
    """Fractional part a - floor(a), in [0, 1); floor convention throughout."""
    return a - math.floor(a)


# Bernoulli polynomials B_1..B_6; h_m(t) = -B_m({t}) / m!
_BERNOULLI = {
    1: (-0.5, 1.0),
    2: (1.0 / 6.0, -1.0, 1.0),
    3: (0.0, 0.5, -1.5, 1.0),
    4: (-1.0 / 30.0, 0.0, 1.0, -2.0, 1.0),
    5: (0.0, -1.0 / 6.0, 0.0, 5.0 / 3.0, -2.5, 1.0),
    6: (1.0 / 42.0, 0.0, -0.5, 0.0, 2.5, -3.0, 1.0),
}
SAWTOOTH_MAX_ORDER = max(_BERNOULLI)


def sawtooth(m: int, t: float) -> float:
    """Order-m sawtooth: h_1(t) = floor(t) - t + 1/2, h_m' = h_{m-1}.

    Closed forms via Bernoulli polynomials on the fractional part; each h_m
    is 1-periodic with zero mean and |h_m| <= 1.  Orders above
    SAWTOOTH_MAX_ORDER are not precomputed.
    """
    if m < 1:
        raise ValueError("order must be >= 1")
    if m > SAWTOOTH_MAX_ORDER:
        raise ValueError(f"sawtooth orders above {SAWTOOTH_MAX_ORDER} not supported")
    u = frac(t)
    coeffs = _BERNOULLI[m]
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * u + c
    return -acc / math.factorial(m)


def sawtooth_family(order: int) -> SawtoothFamily:
    """Build the family up to `order` with its anchor zeros."""
    if not 1 <= order <= SAWTOOTH_MAX_ORDER:
        raise ValueError(f"order must be in 1..{SAWTOOTH_MAX_ORDER}")
    from scipy.optimize import brentq

    anchors = []
    for m in range(1, order + 1):
        ts = np.linspace(0.0, 1.0, 513)
        vals = np.array([sawtooth(m, float(t)) for t in ts])
        anchor = None
        if abs(vals[0]) < 1e-15:
            anchor = 0.0
        else:
            for a, b, va, vb in zip(ts[:-1], ts[1:], vals[:-1], vals[1:]):
                if va == 0.0:
                    anchor = float(a)
                    break
                if va * vb < 0.0:
                    anchor = float(brentq(lambda t: sawtooth(m, t), a, b))
                    break
        if anchor is None:  # cannot happen: zero mean forces a sign change
            raise RuntimeError(f"no zero found for order {m}")
        anchors.append(anchor)
    return SawtoothFamily(order, tuple(anchors))


def kernel_row_sum(n: int) -> float:
    """Compensated row sum; equals 1 up to accumulated rounding."""
    _, vs = kernel_row_arrays(n)
    return kahan_sum(vs)
