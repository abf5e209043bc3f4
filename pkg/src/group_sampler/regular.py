"""Equally spaced sampling formulas for group trajectories.

All formulas sample the trajectory on the grid ``k pi / sigma`` and are
built from the difference quotients::

    q_k = (e^{k h D} f - f) / (k h),   h = pi / sigma,   q_0 = D f

which are the samples of ``F_1(t) = (F(t) - F(0)) / t`` for every pairing
``F(t) = <e^{tD} f, g*>``. Each vector formula is a fixed weighted sum of
samples, so pairing it with a functional gives exactly the scalar series
for ``F``; :func:`scalar_recon_trajectory` exposes that scalar form.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .coefficients import sinc_bound_constant, sinc_derivative, sinc_derivative_complex
from .errors import MissingSamplesError, OverflowGuardError, PreconditionError
from .models import (
    apply_generator,
    bernstein_membership,
    evolve,
    evolve_complex,
    guard_limit,
    sample_trajectory,
)
from .boas import certified_norm
from .summation import symmetric_order, weighted_sum

GRID_MATCH_TOL = 1e-9


def _check_sigma(sigma):
    if not sigma > 0:
        raise PreconditionError("sigma must be positive")


def _check_K(K):
    if int(K) < 1:
        raise PreconditionError("K must be at least 1")


def _sinc(x):
    return sinc_derivative(0, x)


def _dropped_reciprocal_mass(a, K):
    """Bound on ``sum_{|k| > K} 1 / (|k| (|k| - a))`` for ``0 <= a < K``."""
    if a >= K:
        return math.inf
    if a == 0:
        return 2.0 / K
    return 2.0 * math.log(K / (K - a)) / a


def quotient_samples(f, sigma, K):
    """Difference quotients ``q_k`` for ``k`` in increasing ``|k|`` order.

    Row 0 is ``D f`` (the ``k = 0`` quotient is the derivative, never a
    numerical limit).
    """
    ks = symmetric_order(K)
    h = math.pi / sigma
    traj = sample_trajectory(f, ks[1:] * h)
    q = np.empty((ks.size, f.coeffs.size), dtype=complex)
    q[0] = apply_generator(f, 1).coeffs
    q[1:] = (traj.coeffs - f.coeffs) / (ks[1:, None] * h)
    return ks, q


def _s1_weights(ks, x, t):
    # weight of q_k in e^{tD} f - f; one column per evaluation time
    return t[None, :] * _sinc(x[None, :] - ks[:, None])


@dataclass
class ReconstructionReport:
    formula: str
    points: list
    errors: list
    K: int
    tails: list
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            return v
        return {
            "formula": self.formula,
            "points": [enc(p) for p in self.points],
            "errors": list(self.errors),
            "max_error": max(self.errors) if self.errors else 0.0,
            "K": self.K,
            "tails": list(self.tails),
            "wall_time": self.wall_time,
            **self.extra,
        }


def recon_trajectory_many(f, sigma, ts, K):
    """Truncated sampling series for ``e^{tD} f`` at each ``t`` in ``ts``.

    Returns ``(coeff_matrix, tails)``; row ``i`` approximates
    ``evolve(f, ts[i])``.
    """
    _check_sigma(sigma)
    _check_K(K)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    ks, q = quotient_samples(f, sigma, K)
    x = sigma * ts / math.pi
    w = _s1_weights(ks, x, ts)
    coeffs = f.coeffs[None, :] + weighted_sum(w, q)
    # ||q_k|| <= 2||f|| / (|k| h) and |sinc(x - k)| <= 1 / (pi |x - k|)
    nf = certified_norm(f)
    tails = [abs(t) * 2 * nf * sigma / math.pi ** 2 * _dropped_reciprocal_mass(abs(xi), K)
             for t, xi in zip(ts, x)]
    return coeffs, tails


def recon_trajectory(f, sigma, t, K):
    """Approximate ``evolve(f, t)`` from the samples ``evolve(f, k pi / sigma)``."""
    coeffs, _ = recon_trajectory_many(f, sigma, [t], K)
    return f.with_coeffs(coeffs[0])


def scalar_recon_trajectory(F_nodes, dF0, sigma, t, K):
    """Scalar form of the trajectory series.

    ``F_nodes`` maps each integer ``k`` with ``|k| <= K`` to ``F(k pi / sigma)``
    (an array indexed by ``k + K``); ``dF0`` is ``F'(0)``.
    """
    F_nodes = np.asarray(F_nodes, dtype=complex)
    if F_nodes.size != 2 * K + 1:
        raise MissingSamplesError(f"expected {2 * K + 1} samples, got {F_nodes.size}")
    ks = symmetric_order(K)
    F = F_nodes[ks + K]
    h = math.pi / sigma
    q = np.empty(ks.size, dtype=complex)
    q[0] = dF0
    q[1:] = (F[1:] - F[0]) / (ks[1:] * h)
    x = np.array([sigma * t / math.pi])
    w = _s1_weights(ks, x, np.array([float(t)]))
    return complex(F[0] + weighted_sum(w, q[:, None])[0, 0])


def recovery_times(sigma, t, K):
    """Sample times ``k pi / sigma + t`` needed by :func:`recover_state`,
    in increasing ``|k|`` order."""
    return symmetric_order(K) * math.pi / sigma + t


def recover_state(samples, derivative_sample, t, sigma, K):
    """Reconstruct ``f`` from shifted samples without using ``f`` itself.

    ``samples`` is a :class:`~group_sampler.models.Trajectory` containing
    ``e^{(k pi/sigma + t) D} f`` for every ``|k| <= K`` (any order);
    ``derivative_sample`` is the state ``e^{tD} D f``.
    """
    _check_sigma(sigma)
    _check_K(K)
    ks = symmetric_order(K)
    h = math.pi / sigma
    want = ks * h + t
    scale = max(1.0, np.max(np.abs(want)))
    order = np.argsort(samples.times)
    sorted_times = samples.times[order]
    pos = np.clip(np.searchsorted(sorted_times, want), 0, max(sorted_times.size - 1, 0))
    idx = np.empty(ks.size, dtype=np.int64)
    for i, (w, p) in enumerate(zip(want, pos)):
        best = None
        for cand in (p - 1, p):
            if 0 <= cand < sorted_times.size and abs(sorted_times[cand] - w) <= GRID_MATCH_TOL * scale:
                best = cand
        if best is None:
            raise MissingSamplesError(f"no sample at time {w:.12g} (k = {ks[i]})")
        idx[i] = order[best]
    S = samples.coeffs[idx]
    anchor = S[0]
    q = np.empty_like(S)
    q[0] = derivative_sample.coeffs
    q[1:] = (S[1:] - anchor) / (ks[1:, None] * h)
    x = sigma * t / math.pi
    w = -t * _sinc(x + ks)
    coeffs = anchor + weighted_sum(w, q)
    return samples.template.with_coeffs(coeffs)


def recover_from_shift(f, tau, sigma, K):
    """The shift form of the recovery formula, generating its own samples
    ``e^{(k pi/sigma + tau) D} f`` and ``D e^{tau D} f`` from ``f``."""
    samples = sample_trajectory(f, recovery_times(sigma, tau, K))
    deriv = apply_generator(evolve(f, tau), 1)
    return recover_state(samples, deriv, tau, sigma, K)


def recover_tail(f, sigma, t, K):
    nf = certified_norm(f)
    return abs(t) * 2 * nf * sigma / math.pi ** 2 * _dropped_reciprocal_mass(abs(sigma * t / math.pi), K)


def valiron_tschakaloff(f, sigma, z, K, z_max=None):
    """Approximate ``e^{zD} f`` for complex ``z`` from ``f``, ``D f`` and the
    samples ``e^{k pi D / sigma} f``."""
    _check_sigma(sigma)
    _check_K(K)
    z = complex(z)
    limit = guard_limit(f, z_max)
    if abs(z.imag) > limit:
        raise OverflowGuardError(f"|Im z| = {abs(z.imag):g} exceeds guard {limit:g}")
    ks = symmetric_order(K)
    h = math.pi / sigma
    x = sigma * z / math.pi
    samples = np.empty((ks.size + 1, f.coeffs.size), dtype=complex)
    samples[0] = f.coeffs
    samples[1] = apply_generator(f, 1).coeffs
    samples[2:] = sample_trajectory(f, ks[1:] * h).coeffs
    if z.imag == 0:
        s0 = _sinc(x.real)
        sk = _sinc(x.real - ks[1:])
    else:
        s0 = sinc_derivative_complex(0, x)
        sk = sinc_derivative_complex(0, x - ks[1:])
    weights = np.empty(ks.size + 1, dtype=complex)
    weights[0] = s0
    weights[1] = z * s0
    weights[2:] = x / ks[1:] * sk
    coeffs = weighted_sum(weights, samples)
    return f.with_coeffs(coeffs)


def vt_tail(f, sigma, z, K):
    x = sigma * complex(z) / math.pi
    growth = math.cosh(math.pi * abs(x.imag))
    return certified_norm(f) * abs(x) * growth / math.pi * _dropped_reciprocal_mass(abs(x), K)


def _derivative_weights(ks, n, x, scale):
    d_lo = sinc_derivative(n - 1, x - ks)
    d_hi = sinc_derivative(n, x - ks)
    return scale * (n * d_lo + x * d_hi)


def derivative_sampling(f, sigma, n, t, K):
    """Approximate ``e^{tD} D^n f`` from the quotient samples ``q_k``.

    The weights are ``(sigma/pi)^(n-1) [n sinc^(n-1)(x-k) + x sinc^(n)(x-k)]``
    with ``x = sigma t / pi``; the ``(sigma/pi)^(n-1)`` factor is the chain
    rule for the rescaled kernel and equals 1 at ``sigma = pi``.
    """
    _check_sigma(sigma)
    _check_K(K)
    n = int(n)
    if n < 1:
        raise PreconditionError("derivative order must be at least 1")
    ks, q = quotient_samples(f, sigma, K)
    x = sigma * float(t) / math.pi
    w = _derivative_weights(ks, n, x, (sigma / math.pi) ** (n - 1))
    return f.with_coeffs(weighted_sum(w, q))


def q_operator(f, sigma, n, K):
    """``Q^n f``: the derivative-sampling series at ``t = 0``."""
    return derivative_sampling(f, sigma, n, 0.0, K)


def derivative_tail(f, sigma, n, t, K):
    x = abs(sigma * t / math.pi)
    c_lo = sinc_bound_constant(n - 1)
    c_hi = sinc_bound_constant(n)
    per = (sigma / math.pi) ** (n - 1) * (n * c_lo + x * c_hi)
    return 2 * certified_norm(f) * sigma / math.pi * per * _dropped_reciprocal_mass(x, K)


def _membership_flag(f, sigma):
    return {"in_space": bernstein_membership(f, sigma)}


def reconstruct(formula, f, sigma, K, t=0.0, z=None, n=1):
    """Run one formula against its exact oracle and return a report."""
    start = time.perf_counter()
    extra = _membership_flag(f, sigma)
    if formula == "s1":
        coeffs, tails = recon_trajectory_many(f, sigma, [t], K)
        approx = f.with_coeffs(coeffs[0])
        target = evolve(f, t)
        points, tails = [t], tails
    elif formula == "l0":
        approx = recover_from_shift(f, t, sigma, K)
        target = f
        points, tails = [t], [recover_tail(f, sigma, t, K)]
    elif formula == "vt":
        zz = complex(t if z is None else z)
        approx = valiron_tschakaloff(f, sigma, zz, K)
        target = evolve_complex(f, zz)
        points, tails = [zz], [vt_tail(f, sigma, zz, K)]
    elif formula in ("s2", "q"):
        tt = 0.0 if formula == "q" else t
        approx = derivative_sampling(f, sigma, n, tt, K)
        target = evolve(apply_generator(f, n), tt)
        points, tails = [tt], [derivative_tail(f, sigma, n, tt, K)]
        extra["n"] = n
    else:
        raise PreconditionError(f"unknown formula {formula!r}")
    err = (approx - target).norm()
    return ReconstructionReport(formula, points, [err], K, tails,
                                time.perf_counter() - start, extra)
