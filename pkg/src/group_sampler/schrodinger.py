"""Inverse initial-value problem for ``du/dt = iAu``, ``u(0) = f``.

With ``A`` self-adjoint and real spectrum ``lam_j`` the solution is the group
orbit ``u(t) = e^{tD} f`` of the spectral backend. A bandlimited ``f`` is
recovered from the solution sampled at perturbed times ``t_n``: each
functional value ``<f, g*>`` comes from the measurements ``<u(t_n), g*>``.
The coefficient projections form a complete battery, so they determine
``f`` itself.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import PreconditionError
from .irregular import (
    CanonicalProduct,
    irregular_recon_scalar,
    make_nodes,
    measurement_recovery,
    recover_vector,
    recover_vector_shifted,
)
from .models import (
    SpectralState,
    apply_generator,
    bernstein_membership,
    coefficient_battery,
    evolve,
    pair,
    sample_trajectory,
)
from .regular import recover_state, recovery_times

VIAS = ("l2", "l1", "l3")


@dataclass(frozen=True, eq=False)
class CauchyProblem:
    initial: SpectralState
    sigma: float | None = None

    def __post_init__(self):
        if not isinstance(self.initial, SpectralState):
            raise PreconditionError("the Cauchy problem lives in the spectral backend")
        if self.sigma is None:
            object.__setattr__(self, "sigma", self.initial.spectral_radius())
        elif self.sigma < 0 or not bernstein_membership(self.initial, max(self.sigma, 1e-300)):
            raise PreconditionError("initial state is not bandlimited to sigma")

    @property
    def spectrum(self):
        return self.initial.spectrum


def solve(problem, t):
    """``u(t)``; the self-adjoint picture ``e^{itA}`` is the group ``e^{tD}``."""
    return evolve(problem.initial, t)


def solve_many(problem, times):
    return sample_trajectory(problem.initial, times)


@dataclass(frozen=True, eq=False)
class InversionResult:
    values: np.ndarray
    state: SpectralState
    battery: list
    via: str
    in_band: bool
    sigma_f: float


def _in_band(sigma_f, delta):
    if delta is None:
        return sigma_f < math.pi
    if not 0 < delta < math.pi:
        raise PreconditionError("delta must lie in (0, pi)")
    return sigma_f <= math.pi - delta


def invert(samples, cp=None, battery=None, via="l2", tau=0.0, anchor=None,
           derivative=None, sigma=None, K=None, delta=None):
    """Recover ``f`` from samples of the solution.

    * ``via="l2"``: ``samples`` holds ``u(t_n)`` at the nodes of ``cp``.
    * ``via="l3"``: ``samples`` holds ``u(t_n + tau)``, ``anchor`` is ``u(tau)``.
    * ``via="l1"``: ``samples`` holds ``u(k pi/sigma + tau)`` for ``|k| <= K``
      and ``derivative`` is ``D u(tau)``.

    ``values[j]`` is computed from the scalar measurements of ``battery[j]``
    alone; ``state`` is the vector-form recovery. A band violation is
    reported through ``in_band`` and does not stop the computation.
    """
    if via not in VIAS:
        raise PreconditionError(f"unknown recovery path {via!r}")
    template = samples.template
    battery = coefficient_battery(template) if battery is None else list(battery)
    sigma_f = samples.state(0).spectral_radius()
    if via == "l2":
        if cp is None:
            raise PreconditionError("via l2 needs node data")
        state = recover_vector(samples, cp)
        values = [measurement_recovery(samples.pair(g), cp) for g in battery]
    elif via == "l3":
        if cp is None or anchor is None:
            raise PreconditionError("via l3 needs node data and the anchor sample u(tau)")
        state = recover_vector_shifted(samples, anchor, cp, tau)
        values = [irregular_recon_scalar(samples.pair(g), cp, tau, "l3000", anchor=pair(anchor, g))
                  for g in battery]
    else:
        if sigma is None or K is None or derivative is None:
            raise PreconditionError("via l1 needs sigma, K and the derivative sample D u(tau)")
        state = recover_state(samples, derivative, tau, sigma, K)
        values = [pair(state, g) for g in battery]
    return InversionResult(np.array(values, dtype=complex), state, battery, via,
                           _in_band(sigma_f, delta), sigma_f)


@lru_cache(maxsize=8)
def _product(N, rule):
    return CanonicalProduct(make_nodes(N, rule, require_anchor=True))


def round_trip(f, N, rule="const:0.1", via="l2", tau=0.37, sigma=math.pi, delta=None):
    """Solve forward, sample, invert. Returns a report dictionary with
    per-coefficient relative errors (absolute where the true value is 0)."""
    problem = CauchyProblem(f)
    if via == "l1":
        K = int(N)
        samples = solve_many(problem, recovery_times(sigma, tau, K))
        deriv = apply_generator(solve(problem, tau), 1)
        res = invert(samples, via="l1", tau=tau, derivative=deriv, sigma=sigma, K=K, delta=delta)
        nodes = None
    else:
        cp = _product(int(N), rule) if isinstance(rule, str) else CanonicalProduct(
            make_nodes(N, rule, require_anchor=True))
        nodes = cp.nodes
        if via == "l2":
            res = invert(solve_many(problem, nodes.nodes), cp, delta=delta)
        else:
            samples = solve_many(problem, nodes.nodes + tau)
            res = invert(samples, cp, via="l3", tau=tau, anchor=solve(problem, tau), delta=delta)
    true = f.coeffs
    diff = np.abs(res.values - true)
    scale = np.where(true != 0, np.abs(true), 1.0)
    return {
        "true_coeffs": true,
        "recovered_coeffs": res.values,
        "per_coeff_error": diff / scale,
        "state_error": (res.state - f).norm() / f.norm(),
        "in_band": res.in_band,
        "sigma_f": res.sigma_f,
        "via": via,
        "N": int(N),
        "rule": rule if nodes is None else nodes.rule,
    }
