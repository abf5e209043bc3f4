"""Sinc derivatives, Boas coefficients and Favard constants.

``sinc(x) = sin(pi x) / (pi x)``. Its derivatives at half-integers and
integers give the Boas coefficients::

    A[m, k] = (-1)^(k+1) sinc^(2m-1)(1/2 - k)
    B[m, k] = (-1)^(k+1) sinc^(2m)(-k)

Double precision limits the useful range to ``m <= 8`` (derivative order 16).
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .summation import compensated_sum, symmetric_order

TAYLOR_RADIUS = 1.5
MAX_ORDER = 16


def sin_cos_pi(x):
    """``(sin(pi x), cos(pi x))`` with exact zeros at integers and half-integers."""
    x = np.asarray(x, dtype=float)
    n = np.round(2.0 * x)
    y = np.pi * (x - 0.5 * n)
    sy, cy = np.sin(y), np.cos(y)
    q = np.mod(n, 4)
    s = np.select([q == 0, q == 1, q == 2], [sy, cy, -sy], -cy)
    c = np.select([q == 0, q == 1, q == 2], [cy, -sy, -cy], sy)
    return s, c


def sin_cos_pi_complex(z):
    """``(sin(pi z), cos(pi z))`` for complex ``z``, exact on the real integers."""
    z = np.asarray(z, dtype=complex)
    s, c = sin_cos_pi(z.real)
    ch, sh = np.cosh(np.pi * z.imag), np.sinh(np.pi * z.imag)
    return s * ch + 1j * c * sh, c * ch - 1j * s * sh


@lru_cache(maxsize=None)
def _taylor_coefficients(n, terms=40):
    """Powers and coefficients of the series of sinc^(n) about 0."""
    powers, coefs = [], []
    m0 = (n + 1) // 2
    for m in range(m0, m0 + terms):
        p = 2 * m - n
        coefs.append((-1) ** m * math.pi ** (2 * m) / ((2 * m + 1) * math.factorial(p)))
        powers.append(p)
    return np.array(powers), np.array(coefs)


def _sinc_derivative_taylor(n, x):
    powers, coefs = _taylor_coefficients(n)
    # Horner in x^2, highest power first
    acc = np.zeros_like(x)
    x2 = x * x
    for c in coefs[::-1]:
        acc = acc * x2 + c
    return acc * x ** powers[0]


def _sinc_derivative_closed(n, x):
    s, c = sin_cos_pi(x)
    cycle = (s, c, -s, -c)
    px = np.pi * x
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for j in range(n + 1):
        if j:
            term = term * (-px) / j
        total = total + cycle[j % 4] * term
    return (-1) ** n * math.factorial(n) / (np.pi * x ** (n + 1)) * total


def sinc_derivative(n, x):
    """n-th derivative of the normalized sinc at ``x`` (scalar or array).

    Uses the Taylor series about 0 for ``|x| < 1.5`` and the Leibniz closed
    form elsewhere; both agree to about 1e-14 relative at the switch for
    ``n <= 16``.
    """
    n = int(n)
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n > MAX_ORDER:
        raise ValueError(f"derivative order above {MAX_ORDER} exceeds double precision")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    near = np.abs(xa) < TAYLOR_RADIUS
    if np.any(near):
        out[near] = _sinc_derivative_taylor(n, xa[near])
    if np.any(~near):
        out[~near] = _sinc_derivative_closed(n, xa[~near])
    return float(out[0]) if scalar else out


def sinc_derivative_complex(n, z):
    """sinc^(n) at complex points via the closed form (Taylor near 0)."""
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(za)
    near = np.abs(za) < TAYLOR_RADIUS
    if np.any(near):
        powers, coefs = _taylor_coefficients(n)
        zz = za[near]
        acc = np.zeros_like(zz)
        for c in coefs[::-1]:
            acc = acc * zz * zz + c
        out[near] = acc * zz ** powers[0]
    if np.any(~near):
        zz = za[~near]
        s, c = sin_cos_pi_complex(zz)
        cycle = (s, c, -s, -c)
        term = np.ones_like(zz)
        total = np.zeros_like(zz)
        for j in range(n + 1):
            if j:
                term = term * (-np.pi * zz) / j
            total = total + cycle[j % 4] * term
        out[~near] = (-1) ** n * math.factorial(n) / (np.pi * zz ** (n + 1)) * total
    return out[0] if np.ndim(z) == 0 else out


def sinc_complex(z):
    return sinc_derivative_complex(0, z)


def sinc_bound_constant(n, x_max=200.0, points_per_unit=64):
    """Empirical ``C_n = max_{1 <= |x| <= x_max} |x sinc^(n)(x)|``.

    Only used to size tail estimates, never to assert anything.
    """
    x = np.linspace(1.0, x_max, int((x_max - 1.0) * points_per_unit) + 1)
    return float(np.max(np.abs(x * sinc_derivative(n, x))))


def boas_coeff_A(m, k):
    """``A[m, k]`` from the closed form; ``k`` may be an integer array."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be positive")
    h = np.asarray(k, dtype=float) - 0.5
    u = np.pi * h
    poly = np.zeros_like(u)
    for j in range(m):
        poly = poly + (-1) ** j * u ** (2 * j) / math.factorial(2 * j)
    out = math.factorial(2 * m - 1) / (np.pi * h ** (2 * m)) * poly
    return float(out) if np.ndim(out) == 0 else out


def boas_coeff_B(m, k):
    """``B[m, k]``; the ``k = 0`` entry is ``(-1)^(m+1) pi^(2m) / (2m+1)``."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be positive")
    ka = np.asarray(k, dtype=float)
    scalar = ka.ndim == 0
    ka = np.atleast_1d(ka)
    out = np.empty_like(ka)
    zero = ka == 0
    out[zero] = (-1) ** (m + 1) * math.pi ** (2 * m) / (2 * m + 1)
    kk = ka[~zero]
    v = np.pi * kk
    poly = np.zeros_like(v)
    for j in range(m):
        poly = poly + (-1) ** j * v ** (2 * j + 1) / math.factorial(2 * j + 1)
    out[~zero] = math.factorial(2 * m) / (np.pi * kk ** (2 * m + 1)) * poly
    return float(out[0]) if scalar else out


def _dominance_factor(degree, u_min):
    # bounds |sum_i c_i u^(degree-2i)| by (factor) * |leading term| when |u| >= u_min
    ratio = (degree / u_min) ** 2 if degree else 0.0
    return sum(ratio ** i for i in range(degree // 2 + 1))


def analytic_tail(family, m, K, sigma=math.pi):
    """Certified bound on ``(sigma/pi)^r sum_{|k|>K} |coeff|``.

    ``family`` is ``"A"`` (order ``r = 2m-1``) or ``"B"`` (order ``r = 2m``).
    Uses ``|coeff| <= rho * c_m / dist^2`` with ``c_m`` the leading
    asymptotic constant and ``rho`` a dominance factor valid for the dropped
    indices; raises if ``K`` is too small for the bound to apply.
    """
    if family == "A":
        r = 2 * m - 1
        u_min = math.pi * (K + 0.5)
        if u_min <= 2 * m - 2:
            raise ValueError("K too small for the analytic tail bound")
        lead = (2 * m - 1) * math.pi ** (2 * m - 3)
        tail = lead * _dominance_factor(2 * m - 2, u_min) * (1.0 / K + 1.0 / (K + 1))
    elif family == "B":
        r = 2 * m
        u_min = math.pi * (K + 1)
        if u_min <= 2 * m - 1:
            raise ValueError("K too small for the analytic tail bound")
        lead = 2 * m * math.pi ** (2 * m - 2)
        tail = lead * _dominance_factor(2 * m - 1, u_min) * (2.0 / K)
    else:
        raise ValueError(f"unknown family {family!r}")
    return (sigma / math.pi) ** r * tail


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Boas coefficients over ``|k| <= K`` listed in increasing ``|k|``."""

    family: str
    m: int
    K: int
    ks: np.ndarray
    values: np.ndarray

    @property
    def order(self):
        return 2 * self.m - 1 if self.family == "A" else 2 * self.m

    def abs_sum(self):
        return float(compensated_sum(np.abs(self.values)))

    def abs_partial_sums(self, Ks):
        """``sum_{|k| <= K'} |values|`` for each ``K'`` in ``Ks``."""
        absk = np.abs(self.ks)
        return np.array([compensated_sum(np.abs(self.values[absk <= Kp])) for Kp in Ks])


def coefficient_table(family, m, K):
    ks = symmetric_order(K)
    if family == "A":
        values = boas_coeff_A(m, ks)
    elif family == "B":
        values = boas_coeff_B(m, ks)
    else:
        raise ValueError(f"unknown family {family!r}")
    return CoefficientTable(family, int(m), int(K), ks, np.asarray(values))


def _forward_differences(a, p):
    diffs = [a]
    for _ in range(p):
        a = a[:-1] - a[1:]
        diffs.append(a)
    return diffs


def favard(j, head=1000, euler_levels=14, positive_terms=200_000):
    """Favard constant ``K_j = (4/pi) sum_r (-1)^(r(j+1)) / (2r+1)^(j+1)``.

    Returns ``(value, bound)`` with ``|K_j - value| <= bound``. Alternating
    cases (even ``j``) sum a head exactly and bracket the tail by a repeated
    Euler transform; positive cases bracket the tail between trapezoid and
    midpoint integrals. Both brackets rely on ``(2r+1)^(-s)`` being
    completely monotone.
    """
    j = int(j)
    if j < 0:
        raise ValueError("j must be nonnegative")
    s = j + 1
    eps = np.finfo(float).eps
    if j % 2 == 0:
        r = np.arange(head, dtype=float)
        signs = np.where(np.arange(head) % 2 == 0, 1.0, -1.0)
        partial = compensated_sum(signs / (2 * r + 1) ** s)
        a = 1.0 / (2 * np.arange(head, head + euler_levels + 1, dtype=float) + 1) ** s
        diffs = _forward_differences(a, euler_levels)
        tail = sum(d[0] / 2 ** (q + 1) for q, d in enumerate(diffs[:-1]))
        slack = max(diffs[-1][0], 0.0) / 2 ** (euler_levels + 1)
        tail += slack
        tail_sign = 1.0 if head % 2 == 0 else -1.0
        value = partial + tail_sign * tail
        bound = slack + 4 * eps * a[0] * euler_levels
    else:
        R = positive_terms if s == 2 else min(positive_terms, 20_000)
        r = np.arange(R, dtype=float)
        partial = compensated_sum(1.0 / (2 * r + 1) ** s)
        g_R = 1.0 / (2 * R + 1) ** s
        lower = (2 * R + 1) ** (1 - s) / (2 * (s - 1)) + g_R / 2
        upper = (2.0 * R) ** (1 - s) / (2 * (s - 1))
        value = partial + (lower + upper) / 2
        bound = (upper - lower) / 2
    bound += 4 * eps * abs(value)
    return 4 / math.pi * value, 4 / math.pi * bound


@dataclass(frozen=True, eq=False)
class FavardTable:
    values: np.ndarray
    bounds: np.ndarray

    def __getitem__(self, j):
        return float(self.values[j])

    def __len__(self):
        return self.values.size

    def interval_violations(self):
        """Indices whose certified enclosure contradicts the Favard intervals
        ``K_{2j} in [1, 4/pi)`` and ``K_{2j+1} in (pi/4, pi/2]``."""
        bad = []
        for j, (v, b) in enumerate(zip(self.values, self.bounds)):
            lo, hi = v - b, v + b
            if j % 2 == 0:
                ok = hi >= 1.0 and lo < 4 / math.pi
            else:
                ok = hi > math.pi / 4 and lo <= math.pi / 2
            if not ok:
                bad.append(j)
        return bad


@lru_cache(maxsize=None)
def favard_table(j_max):
    pairs = [favard(j) for j in range(j_max + 1)]
    return FavardTable(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))


def kolmogorov_constant(k, n):
    """``C_{k,n} = K_{n-k}^n / K_n^{n-k}``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if k in (0, n):
        return 1.0
    table = favard_table(max(n, 1))
    return table[n - k] ** n / table[n] ** (n - k)
