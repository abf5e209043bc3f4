"""Measurable characterizations of exponential type.

* spectral type ``d_f = lim ||D^k f||^{1/k}``, compared with ``sigma_f``;
* the Stein-Kolmogorov inequality with Favard constants;
* the modulus of continuity ``sup_{|tau|<=s} ||(I - e^{tau D})^m f||``;
* the Jackson-type ratio between best approximation from a Bernstein space
  and ``sigma^{-k} Omega_{m-k}(D^k f, 1/sigma)``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .coefficients import kolmogorov_constant
from .errors import BackendMismatchError, DegenerateRatioError, PreconditionError, ZeroVectorError
from .models import SpectralState, apply_generator, spectral_truncation

KS_SLACK = 1e-12
_I_POWERS = (1.0, 1j, -1.0, -1j)


def _scaled_generator_norms(f, ks):
    """``||D^k f|| / sigma_f^k`` for each ``k`` without overflow."""
    sigma = f.spectral_radius()
    ratio = f.freqs / sigma
    rows = np.array([_I_POWERS[k % 4] * ratio ** k for k in ks]) * f.coeffs
    return sigma, np.asarray(f.coefficient_norm(rows), dtype=float)


@dataclass(frozen=True, eq=False)
class SpectralTypeReport:
    ks: np.ndarray
    sequence: np.ndarray
    d_f: float
    last: float
    sigma_f: float

    def to_dict(self):
        return {"k": self.ks.tolist(), "sequence": self.sequence.tolist(), "d_f": self.d_f,
                "last": self.last, "sigma_f": self.sigma_f}


def spectral_type(f, k_max=500):
    """``(||D^k f|| / ||f||)^{1/k}`` for ``k = 1..k_max`` and its limit.

    Dividing by ``||f||`` leaves the limit unchanged and makes an eigenvector
    exact at every ``k``. The estimate fits ``log s_k = log d + a/k`` on the
    last quartile of ``k``.
    """
    if k_max < 2:
        raise PreconditionError("k_max must be at least 2")
    f_norm = f.norm()
    if f_norm == 0 or not np.any(f.coeffs != 0):
        raise ZeroVectorError("spectral type is undefined for the zero vector")
    ks = np.arange(1, k_max + 1)
    sigma = f.spectral_radius()
    if sigma == 0:
        seq = np.zeros(k_max)
        return SpectralTypeReport(ks, seq, 0.0, 0.0, 0.0)
    _, scaled = _scaled_generator_norms(f, ks)
    seq = sigma * (scaled / f_norm) ** (1.0 / ks)
    tail = ks[-max(2, k_max // 4):]
    y = np.log(seq[tail - 1])
    if np.ptp(y) == 0:
        d_f = float(seq[-1])
    else:
        slope, intercept = np.polyfit(1.0 / tail, y, 1)
        d_f = float(math.exp(intercept))
    return SpectralTypeReport(ks, seq, d_f, float(seq[-1]), sigma)


def kolmogorov_check(f, k, n):
    """``(lhs, rhs, holds)`` for ``||D^k f||^n <= C_{k,n} ||D^n f||^k ||f||^{n-k}``."""
    if not 0 <= k <= n:
        raise PreconditionError("need 0 <= k <= n")
    f_norm = f.norm()
    if f_norm == 0:
        raise ZeroVectorError("inequality check needs a nonzero vector")
    dk = apply_generator(f, k).norm()
    dn = apply_generator(f, n).norm()
    lhs = dk ** n
    rhs = kolmogorov_constant(k, n) * dn ** k * f_norm ** (n - k)
    return lhs, rhs, bool(lhs <= rhs * (1 + KS_SLACK))


def bernstein_inequality(f, sigma, k_max=30):
    """Per ``k``: whether ``||D^k f|| <= sigma^k ||f||`` (relative slack 1e-12)."""
    f_norm = f.norm()
    out = []
    for k in range(k_max + 1):
        out.append(apply_generator(f, k).norm() <= sigma ** k * f_norm * (1 + KS_SLACK))
    return out


def modulus_of_continuity(f, m, s, grid=401):
    """Grid supremum of ``||(I - e^{tau D})^m f||`` over ``|tau| <= s``.

    ``grid`` is a point count for a symmetric grid containing ``0`` and
    ``+-s``, or an explicit array of ``tau`` values (a lower bound either way).
    """
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    if not s >= 0:
        raise PreconditionError("s must be nonnegative")
    if m == 0:
        return f.norm()
    if s == 0:
        return 0.0
    if np.ndim(grid) == 0:
        count = int(grid) | 1
        taus = np.linspace(-s, s, count)
    else:
        taus = np.asarray(grid, dtype=float)
        if np.any(np.abs(taus) > s):
            raise PreconditionError("grid points must satisfy |tau| <= s")
    rows = (1 - np.exp(1j * np.outer(taus, f.freqs))) ** m * f.coeffs
    return float(np.max(f.coefficient_norm(rows)))


@dataclass(frozen=True, eq=False)
class JacksonRow:
    sigma: float
    best_error: float
    bound_term: float
    ratio: float


def jackson_ratio(f, k, m, sigmas, grid=401):
    """Ratio of ``inf_{g in B_sigma} ||f - g||`` to
    ``sigma^{-k} Omega_{m-k}(D^k f, 1/sigma)`` for each ``sigma``.

    Returns ``(rows, max_ratio)``. The best approximation is the spectral
    truncation, exact in the Hilbert norm, so only :class:`SpectralState`
    is accepted.
    """
    if not isinstance(f, SpectralState):
        raise BackendMismatchError("best approximation is exact only in the spectral backend")
    if not 0 <= k <= m:
        raise PreconditionError("need 0 <= k <= m")
    dk = apply_generator(f, k)
    rows = []
    for sigma in sigmas:
        sigma = float(sigma)
        if not sigma > 0:
            raise PreconditionError("sigma must be positive")
        best = (f - spectral_truncation(f, sigma)).norm()
        term = sigma ** (-k) * modulus_of_continuity(dk, m - k, 1.0 / sigma, grid)
        if best == 0:
            ratio = 0.0
        elif term == 0:
            raise DegenerateRatioError(f"modulus vanishes at sigma={sigma:g} with nonzero error")
        else:
            ratio = best / term
        rows.append(JacksonRow(sigma, best, term, ratio))
    return rows, max(r.ratio for r in rows)
