"""Perturbed-node sampling through the canonical product.

Nodes ``t_n = n + delta_n`` with ``sup |delta_n| < 1/4`` define::

    G(z) = (z - t_0) prod_{n != 0} (1 - z / t_n)

and the interpolation kernel ``G(z) / (G'(t_n) (z - t_n))``. The product is
truncated at ``|n| <= N``. Numerator and denominators always come from the
same truncated product, which makes every kernel value the Lagrange basis
polynomial of the node set, so the truncation factor cancels exactly.

Products are carried as (sign or phase, log-magnitude) and only ratios are
exponentiated; the plain product under- or overflows for ``N`` in the
thousands.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import AnchorNodeError, NodeBoundError, ParseError, PreconditionError
from .models import bernstein_membership, sample_trajectory
from .summation import symmetric_order, weighted_sum

KADEC_BOUND = 0.25
_ROW_CHUNK = 256


@dataclass(frozen=True, eq=False)
class SamplingNodes:
    N: int
    ns: np.ndarray
    nodes: np.ndarray
    deviation: float
    rule: str

    @property
    def t0(self):
        return float(self.nodes[self.N])

    def __len__(self):
        return self.nodes.size

    def index_of(self, n):
        if not -self.N <= n <= self.N:
            raise IndexError(f"node index {n} outside [-{self.N}, {self.N}]")
        return n + self.N

    def require_anchor(self):
        if self.t0 == 0:
            raise AnchorNodeError("t_0 = 0: recovery formulas need a nonzero anchor node")


def _validate(ns, nodes, rule, require_anchor):
    deviation = float(np.max(np.abs(nodes - ns)))
    if not deviation < KADEC_BOUND:
        raise NodeBoundError(f"node deviation {deviation:g} is not below 1/4 (rule {rule})")
    if not np.all(np.isfinite(nodes)):
        raise NodeBoundError("nodes must be finite")
    N = (ns.size - 1) // 2
    out = SamplingNodes(N, ns, nodes, deviation, rule)
    if require_anchor:
        out.require_anchor()
    return out


def parse_rule(rule):
    """``"zero"``, ``"sin:d"``, ``"const:d"`` or ``"rand:d:seed"`` to a callable
    mapping node indices to deviations."""
    if callable(rule):
        return rule, getattr(rule, "__name__", "custom")
    parts = str(rule).split(":")
    try:
        if parts[0] == "zero" and len(parts) == 1:
            return (lambda n: np.zeros(n.shape)), "zero"
        if parts[0] == "sin" and len(parts) == 2:
            d = float(parts[1])
            return (lambda n: d * np.sin(n)), rule
        if parts[0] == "const" and len(parts) == 2:
            d = float(parts[1])
            return (lambda n: np.full(n.shape, d)), rule
        if parts[0] == "rand" and len(parts) == 3:
            d, seed = float(parts[1]), int(parts[2])

            def draw(n):
                # one draw per index, independent of N, so nested truncations agree
                out = np.empty(n.shape)
                for i, k in enumerate(n):
                    out[i] = np.random.default_rng([seed, int(k) & 0xFFFFFFFF, int(k < 0)]).uniform(-d, d)
                return out

            return draw, rule
    except ValueError as exc:
        raise ParseError(f"bad node rule {rule!r}: {exc}") from exc
    raise ParseError(f"unknown node rule {rule!r}")


def make_nodes(N, rule="zero", require_anchor=False):
    """Nodes ``t_n = n + delta_n`` for ``|n| <= N``; rejects ``sup|delta| >= 1/4``."""
    N = int(N)
    if N < 1:
        raise PreconditionError("N must be at least 1")
    fn, name = parse_rule(rule)
    ns = np.arange(-N, N + 1)
    nodes = ns + np.asarray(fn(ns), dtype=float)
    return _validate(ns, nodes, name, require_anchor)


def nodes_from_list(entries, require_anchor=False):
    """Nodes from ``[{"n": n, "t_n": t}, ...]`` covering ``-N..N`` exactly once."""
    try:
        pairs = sorted((int(e["n"]), float(e["t_n"])) for e in entries)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad node list: {exc}") from exc
    ns = np.array([p[0] for p in pairs])
    N = (ns.size - 1) // 2
    if ns.size % 2 == 0 or np.any(ns != np.arange(-N, N + 1)):
        raise ParseError("node list must cover every index -N..N exactly once")
    return _validate(ns, np.array([p[1] for p in pairs]), "list", require_anchor)


def _log_abs_one_minus(z, t):
    """``log|1 - z/t|`` for real arrays, accurate both near 0 and near 1."""
    ratio = z / t
    small = np.abs(ratio) < 0.5
    with np.errstate(divide="ignore"):
        far = np.log(np.abs(t - z)) - np.log(np.abs(t))
        near = np.log1p(-np.where(small, ratio, 0.0))
    return np.where(small, near, far)


def _log_one_minus_complex(z, t):
    """Principal ``log(1 - z/t)`` for complex ``z`` and real ``t``."""
    w = -z / t
    with np.errstate(divide="ignore"):
        mag = 0.5 * np.log1p(2 * w.real + (w * np.conj(w)).real)
    return mag + 1j * np.arctan2(w.imag, 1 + w.real)


class CanonicalProduct:
    """Truncated ``G`` for a node set, with ``G'(t_n)`` cached per node.

    ``R(z) = prod_{m != 0} (1 - z / t_m)`` is kept in log form, so
    ``G(z) = (z - t_0) R(z)``. ``P_n`` is ``R`` at ``t_n`` with the ``n``-th
    factor skipped; ``G'(t_n) = (t_n - t_0)(-1/t_n) P_n`` for ``n != 0`` and
    ``G'(t_0) = R(t_0)``.
    """

    def __init__(self, nodes):
        self.nodes = nodes
        self._others = np.delete(nodes.nodes, nodes.N)
        self._other_idx = np.delete(np.arange(nodes.nodes.size), nodes.N)
        self._full = None

    def _skip_products(self, rows):
        t = self.nodes.nodes
        others = self._others
        log_p = np.empty(rows.size)
        sign_p = np.empty(rows.size)
        for start in range(0, rows.size, _ROW_CHUNK):
            chunk = rows[start:start + _ROW_CHUNK]
            z = t[chunk][:, None]
            vals = _log_abs_one_minus(z, others[None, :])
            signs = np.sign(1 - z / others[None, :])
            skip = self._other_idx[None, :] == chunk[:, None]
            vals = np.where(skip, 0.0, vals)
            signs = np.where(skip, 1.0, signs)
            log_p[start:start + chunk.size] = np.sum(vals, axis=1)
            sign_p[start:start + chunk.size] = np.prod(signs, axis=1)
        return log_p, sign_p

    def _products(self):
        # all skip-products at once: O(N^2), built on first kernel use
        if self._full is None:
            self._full = self._skip_products(np.arange(self.nodes.nodes.size))
        return self._full

    def _product_at(self, idx):
        if self._full is not None:
            return self._full[0][idx], self._full[1][idx]
        log_p, sign_p = self._skip_products(np.array([idx]))
        return log_p[0], sign_p[0]

    @property
    def _log_p(self):
        return self._products()[0]

    @property
    def _sign_p(self):
        return self._products()[1]

    @property
    def t0(self):
        return self.nodes.t0

    def log_r(self, z):
        """``(phase_or_sign, log|R(z)|)`` for scalar ``z``."""
        others = self._others
        if isinstance(z, complex) or np.iscomplexobj(z):
            logs = _log_one_minus_complex(complex(z), others)
            total = np.sum(logs)
            return np.exp(1j * total.imag), float(total.real)
        z = float(z)
        return float(np.prod(np.sign(1 - z / others))), float(np.sum(_log_abs_one_minus(z, others)))

    def g_prime(self, idx):
        """``G'(t_n)`` at array position ``idx`` (plain value)."""
        t = self.nodes.nodes
        log_p, sign_p = self._product_at(idx)
        p = sign_p * math.exp(log_p)
        if idx == self.nodes.N:
            return p
        return (t[idx] - self.t0) * (-1.0 / t[idx]) * p

    def kernel(self, z, denominators=None):
        """Kernel values ``G(z) / (G'(t_n)(z - t_n))`` for every node.

        ``denominators`` may be another :class:`CanonicalProduct` over a
        superset of nodes; its ``G'`` values then replace this product's
        while ``G(z)`` stays truncated here. This mixes truncation levels
        and breaks the cancellation (used only for comparison).
        At a node the kernel is the unit vector of that node.
        """
        t = self.nodes.nodes
        N = self.nodes.N
        cplx = isinstance(z, complex) and z.imag != 0
        zr = z.real if isinstance(z, complex) else float(z)
        if not cplx:
            hit = np.nonzero(t == zr)[0]
            if hit.size:
                out = np.zeros(t.size)
                out[hit[0]] = 1.0
                return out
        zz = complex(z) if cplx else zr
        phase_r, log_r = self.log_r(zz)
        if denominators is None:
            log_p, sign_p, t0 = self._log_p, self._sign_p, self.t0
        else:
            off = denominators.nodes.N - N
            if off < 0 or np.any(denominators.nodes.nodes[off:off + t.size] != t):
                raise PreconditionError("denominator product must extend the node set")
            idx = np.arange(t.size) + off
            log_p = denominators._log_p[idx]
            sign_p = denominators._sign_p[idx]
            t0 = denominators.t0
        out = np.empty(t.size, dtype=complex if cplx else float)
        nz = np.arange(t.size) != N
        tn = t[nz]
        if cplx:
            skip = _log_one_minus_complex(zz, tn)
            mag = log_r - skip.real - log_p[nz]
            ph = phase_r * np.exp(-1j * skip.imag) * sign_p[nz]
            out[nz] = (zz - t0) / (tn - t0) * ph * np.exp(mag)
            out[N] = phase_r * sign_p[N] * math.exp(log_r - log_p[N])
        else:
            skip = _log_abs_one_minus(zr, tn)
            sgn = phase_r * np.sign(1 - zr / tn) * sign_p[nz]
            out[nz] = (zr - t0) / (tn - t0) * sgn * np.exp(log_r - skip - log_p[nz])
            out[N] = phase_r * sign_p[N] * math.exp(log_r - log_p[N])
        return out


def g_eval(cp, z, log=False):
    """Truncated ``G(z)``; with ``log=True`` returns ``(lin, phase, log|R|)``
    such that ``G = lin * phase * exp(log|R|)``."""
    phase, log_r = cp.log_r(z)
    lin = z - cp.t0
    if log:
        return lin, phase, log_r
    with np.errstate(over="ignore"):
        return lin * phase * math.exp(log_r) if log_r > -math.inf else 0.0 * lin


def g_prime_at_node(cp, m):
    """``G'(t_m)`` by skipping the vanishing factor."""
    return cp.g_prime(cp.nodes.index_of(m))


def _symmetric_positions(N):
    return symmetric_order(N) + N


def _series(weights, samples):
    """Compensated kernel sum in increasing ``|n|`` order."""
    N = (weights.shape[0] - 1) // 2
    pos = _symmetric_positions(N)
    return weighted_sum(weights[pos], np.asarray(samples)[pos])


def irregular_recon_scalar(samples, cp, t, formula="s4", anchor=None):
    """Scalar reconstruction from node samples.

    ``formula``:

    * ``"s4"``: ``sum_n F(t_n) K_n(t)`` (``samples[n] = F(t_n)``), valid for
      complex ``t`` as well.
    * ``"s3"``: ``F(0) + t sum_n (F(t_n) - F(0)) / t_n K_n(t)`` with
      ``anchor = F(0)``.
    * ``"l3000"``: recovers ``F(0)`` from ``samples[n] = F(t_n + t)`` and
      ``anchor = F(t)`` via
      ``F(t) + t sum_n (F(t_n + t) - F(t)) / t_n * G(-t) / (G'(t_n)(t + t_n))``.
    """
    F = np.asarray(samples, dtype=complex)
    if F.size != len(cp.nodes):
        raise PreconditionError("one sample per node is required")
    t_n = cp.nodes.nodes
    if formula == "s4":
        return complex(_series(cp.kernel(t), F[:, None])[0])
    if anchor is None:
        raise PreconditionError(f"formula {formula} needs an anchor sample")
    cp.nodes.require_anchor()
    lifted = (F - anchor) / t_n
    if formula == "s3":
        t = float(t)
        if t == 0:
            return complex(anchor)
        return complex(anchor + t * _series(cp.kernel(t), lifted[:, None])[0])
    if formula == "l3000":
        t = float(t)
        if t == 0:
            return complex(anchor)
        # G(-t) / (G'(t_n)(t + t_n)) = -K_n(-t)
        return complex(anchor - t * _series(cp.kernel(-t), lifted[:, None])[0])
    raise PreconditionError(f"unknown formula {formula!r}")


@dataclass(frozen=True, eq=False)
class IrregularResult:
    value: object
    in_space: bool
    delta: float


def irregular_series(samples, cp, z):
    """Vector kernel sum over a trajectory sampled at the nodes."""
    if samples.times.size != len(cp.nodes) or np.any(samples.times != cp.nodes.nodes):
        raise PreconditionError("samples must be taken at the node times, in node order")
    w = cp.kernel(z)
    return samples.template.with_coeffs(_series(w, samples.coeffs))


def irregular_recon_vector(f, cp, z, delta):
    """Approximate ``e^{zD} f`` from ``e^{t_n D} f``; flags ``sigma_f > pi - delta``."""
    if not 0 < delta < math.pi:
        raise PreconditionError("delta must lie in (0, pi)")
    samples = sample_trajectory(f, cp.nodes.nodes)
    value = irregular_series(samples, cp, z)
    return IrregularResult(value, bernstein_membership(f, math.pi - delta), delta)


def recovery_weights(cp):
    """``-G(0) / (G'(t_n) t_n)`` for every node (``t_0 != 0`` required)."""
    cp.nodes.require_anchor()
    return cp.kernel(0.0)


def measurement_recovery(samples, cp):
    """``<f, g*>`` from the measurements ``<e^{t_n D} f, g*>``."""
    F = np.asarray(samples, dtype=complex)
    if F.size != len(cp.nodes):
        raise PreconditionError("one sample per node is required")
    return complex(_series(recovery_weights(cp), F[:, None])[0])


def recover_vector(samples, cp):
    """Vector form of :func:`measurement_recovery` over a trajectory."""
    cp.nodes.require_anchor()
    return irregular_series(samples, cp, 0.0)


def recover_vector_shifted(samples, anchor, cp, t):
    """Vector form of the ``"l3000"`` recovery: ``f`` from ``e^{(t_n + t) D} f``
    (``samples``, in node order) and ``anchor = e^{tD} f``."""
    cp.nodes.require_anchor()
    want = cp.nodes.nodes + t
    if samples.times.size != want.size or np.any(np.abs(samples.times - want) > 1e-12 * (1 + np.abs(want))):
        raise PreconditionError("samples must be taken at t_n + t, in node order")
    t = float(t)
    if t == 0:
        return anchor
    lifted = (samples.coeffs - anchor.coeffs) / cp.nodes.nodes[:, None]
    return anchor.with_coeffs(anchor.coeffs - t * _series(cp.kernel(-t), lifted))
