"""Deterministic compensated summation over symmetric index windows.

All truncated series in the package are reduced here. Terms are visited in a
fixed order (increasing ``|k|``) and every floating-point addition is tracked
with Knuth's error-free TwoSum, so results are reproducible bit-for-bit and
accurate to a few ulps of the largest partial sum.
"""

import numpy as np

LANES = 128


def symmetric_order(K, include_zero=True):
    """Indices 0, 1, -1, 2, -2, ..., K, -K (increasing |k|)."""
    pos = np.arange(1, K + 1, dtype=np.int64)
    out = np.empty(2 * K, dtype=np.int64)
    out[0::2] = pos
    out[1::2] = -pos
    if include_zero:
        out = np.concatenate([np.zeros(1, dtype=np.int64), out])
    return out


def _two_sum_into(s, c, x):
    t = s + x
    z = t - s
    c += (s - (t - z)) + (x - z)
    s[...] = t


def _collapse_lanes(s, c):
    total = np.zeros(s.shape[1:])
    carry = np.zeros(s.shape[1:])
    for lane in range(s.shape[0]):
        _two_sum_into(total, carry, s[lane])
        _two_sum_into(total, carry, c[lane])
    return total + carry


def _as_real(a):
    a = np.ascontiguousarray(a)
    if np.iscomplexobj(a):
        return a.view(float)
    return a.astype(float)


def _from_real(r, cplx):
    if cplx:
        return np.ascontiguousarray(r).view(complex)
    return r


def compensated_sum(terms, axis=0):
    """Compensated sum of ``terms`` along ``axis``, in array order."""
    terms = np.moveaxis(np.asarray(terms), axis, 0)
    cplx = np.iscomplexobj(terms)
    n = terms.shape[0]
    rest = terms.shape[1:]
    if n == 0:
        return np.zeros(rest, dtype=complex if cplx else float)
    flat = _as_real(terms.reshape(n, -1))
    width = flat.shape[1]
    n_blocks = -(-n // LANES)
    s = np.zeros((LANES, width))
    c = np.zeros((LANES, width))
    for b in range(n_blocks):
        block = flat[b * LANES:(b + 1) * LANES]
        if block.shape[0] < LANES:
            block = np.concatenate([block, np.zeros((LANES - block.shape[0], width))])
        _two_sum_into(s, c, block)
    out = _from_real(_collapse_lanes(s, c), cplx)
    return out.reshape(rest)


def weighted_sum(weights, samples):
    """Compensated ``sum_k weights[k, ...] * samples[k]``.

    ``weights`` has shape ``(n_terms,)`` or ``(n_terms, n_eval)``; ``samples``
    has shape ``(n_terms, n_coeffs)``. Returns ``(n_coeffs,)`` or
    ``(n_eval, n_coeffs)``. Terms are materialized one lane-block at a time.
    """
    weights = np.asarray(weights)
    samples = np.asarray(samples)
    scalar_weights = weights.ndim == 1
    w = weights[:, None] if scalar_weights else weights
    if w.shape[0] != samples.shape[0]:
        raise ValueError("weights and samples disagree on the number of terms")
    n, n_eval = w.shape
    n_coeffs = samples.shape[1]
    cplx = np.iscomplexobj(w) or np.iscomplexobj(samples)
    width = n_eval * n_coeffs * (2 if cplx else 1)
    s = np.zeros((LANES, width))
    c = np.zeros((LANES, width))
    for start in range(0, n, LANES):
        wb = w[start:start + LANES]
        xb = samples[start:start + LANES]
        block = wb[:, :, None] * xb[:, None, :]
        block = _as_real(block.reshape(block.shape[0], -1))
        if block.shape[0] < LANES:
            block = np.concatenate([block, np.zeros((LANES - block.shape[0], width))])
        _two_sum_into(s, c, block)
    out = _from_real(_collapse_lanes(s, c), cplx).reshape(n_eval, n_coeffs)
    return out[0] if scalar_weights else out
