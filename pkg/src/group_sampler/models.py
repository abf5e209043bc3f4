"""Exact finite realizations of a one-parameter isometry group.

Two backends share one algebra. A vector is a coefficient array over a finite
set of real frequencies, and the group acts diagonally::

    e^{tD} : c_j -> exp(i * lam_j * t) * c_j
    D      : c_j -> (i * lam_j) * c_j

* :class:`SpectralState` reads the coefficients as coordinates in an
  orthonormal eigenbasis; the norm is the Euclidean one. This is also the
  self-adjoint picture ``e^{itA}`` with ``A`` having real spectrum ``lam_j``,
  so the Schrodinger model needs no separate backend.
* :class:`ExpSumSignal` reads them as the exponential sum
  ``x -> sum_j c_j exp(i w_j x)`` under the translation group; the norm is
  the sup norm on the real line, bracketed by a grid maximum (lower bound)
  and ``sum_j |c_j|`` (upper bound).
"""

from dataclasses import dataclass, field
import json
import math
from pathlib import Path

import numpy as np

from .errors import BackendMismatchError, OverflowGuardError, ParseError

DEFAULT_GUARD = 50.0


@dataclass(frozen=True, eq=False)
class Spectrum:
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float).ravel()
        if lam.size == 0:
            raise ValueError("spectrum must be nonempty")
        if not np.all(np.isfinite(lam)):
            raise ValueError("spectrum must be finite")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("spectrum must be strictly increasing")
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    def __len__(self):
        return self.lambdas.size


def _coeff_array(coeffs, n):
    c = np.array(coeffs, dtype=complex).ravel()
    if c.size != n:
        raise ValueError(f"expected {n} coefficients, got {c.size}")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    c.setflags(write=False)
    return c


class _DiagonalModel:
    """Shared diagonal group algebra; subclasses supply ``freqs`` and ``norm``."""

    coeffs: np.ndarray

    @property
    def freqs(self):
        raise NotImplementedError

    def with_coeffs(self, coeffs):
        raise NotImplementedError

    def norm(self):
        raise NotImplementedError

    def spectral_radius(self):
        """``sigma_f``: largest ``|lam_j|`` carrying a nonzero coefficient."""
        live = self.coeffs != 0
        if not np.any(live):
            return 0.0
        return float(np.max(np.abs(self.freqs[live])))

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.with_coeffs(self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralState(_DiagonalModel):
    spectrum: Spectrum
    coeffs: np.ndarray

    def __post_init__(self):
        if not isinstance(self.spectrum, Spectrum):
            object.__setattr__(self, "spectrum", Spectrum(self.spectrum))
        object.__setattr__(self, "coeffs", _coeff_array(self.coeffs, len(self.spectrum)))

    @property
    def freqs(self):
        return self.spectrum.lambdas

    def with_coeffs(self, coeffs):
        return SpectralState(self.spectrum, coeffs)

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def coefficient_norm(self, coeffs):
        return np.linalg.norm(coeffs, axis=-1)


@dataclass(frozen=True, eq=False)
class ExpSumSignal(_DiagonalModel):
    """Exponential sum ``sum_j c_j exp(i w_j x)``; ``window`` is the half-width
    of the grid used for sup-norm estimates."""

    freqs_: np.ndarray
    coeffs: np.ndarray
    window: float = 10.0
    grid_density: float | None = None

    def __post_init__(self):
        w = np.asarray(self.freqs_, dtype=float).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)):
            raise ValueError("frequencies must be finite and nonempty")
        if np.unique(w).size != w.size:
            raise ValueError("frequencies must be distinct")
        w.setflags(write=False)
        object.__setattr__(self, "freqs_", w)
        object.__setattr__(self, "coeffs", _coeff_array(self.coeffs, w.size))
        if not self.window > 0:
            raise ValueError("window must be positive")
        if self.grid_density is None:
            sigma = float(np.max(np.abs(w)))
            object.__setattr__(self, "grid_density", max(64.0, 64.0 * sigma / math.pi))
        elif not self.grid_density > 0:
            raise ValueError("grid_density must be positive")

    @property
    def freqs(self):
        return self.freqs_

    def with_coeffs(self, coeffs):
        return ExpSumSignal(self.freqs_, coeffs, self.window, self.grid_density)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * np.multiply.outer(x, self.freqs_)) @ self.coeffs

    def grid(self):
        n = int(math.ceil(2 * self.window * self.grid_density)) + 1
        return np.linspace(-self.window, self.window, n)

    def coefficient_norm(self, coeffs):
        basis = np.exp(1j * np.outer(self.grid(), self.freqs_))
        return np.max(np.abs(np.asarray(coeffs) @ basis.T), axis=-1)

    def norm(self):
        """Grid supremum over ``[-window, window]`` (a lower bound)."""
        return float(self.coefficient_norm(self.coeffs))

    def norm_upper(self):
        return float(np.sum(np.abs(self.coeffs)))

    def norm_bounds(self):
        return self.norm(), self.norm_upper()


def _check_compatible(f, g):
    if type(f) is not type(g) or f.freqs.shape != g.freqs.shape or np.any(f.freqs != g.freqs):
        raise BackendMismatchError("vectors live in different models")


def norm(f):
    return f.norm()


def evolve(f, t):
    """Exact group action ``e^{tD} f`` for real ``t``."""
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    return f.with_coeffs(np.exp(1j * f.freqs * t) * f.coeffs)


def guard_limit(f, z_max=None):
    if z_max is not None:
        return float(z_max)
    sigma = f.spectral_radius()
    return math.inf if sigma == 0 else DEFAULT_GUARD / sigma


def evolve_complex(f, z, z_max=None):
    """Complexified action ``e^{zD} f``; ``|Im z|`` is capped by ``z_max``
    (default ``50 / sigma_f``)."""
    z = complex(z)
    limit = guard_limit(f, z_max)
    if abs(z.imag) > limit:
        raise OverflowGuardError(f"|Im z| = {abs(z.imag):g} exceeds guard {limit:g}")
    return f.with_coeffs(np.exp(1j * f.freqs * z) * f.coeffs)


def apply_generator(f, k=1):
    """``D^k f``: multiplication by ``(i lam_j)^k``."""
    k = int(k)
    if k < 0:
        raise ValueError("generator power must be nonnegative")
    if k == 0:
        return f
    return f.with_coeffs((1j * f.freqs) ** k * f.coeffs)


def bernstein_membership(f, sigma):
    """True iff every nonzero coefficient sits at ``|lam_j| <= sigma``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    live = f.coeffs != 0
    return bool(np.all(np.abs(f.freqs[live]) <= sigma))


def spectral_truncation(f, sigma):
    """Orthogonal projection onto the Bernstein space of type ``sigma``."""
    return f.with_coeffs(np.where(np.abs(f.freqs) <= sigma, f.coeffs, 0))


@dataclass(frozen=True)
class DualFunctional:
    """A bounded functional: ``coefficient`` projection (spectral backend) or
    ``point`` evaluation at ``x0`` (translation backend). Both have norm 1."""

    kind: str
    index: int | None = None
    x0: float | None = None

    def __post_init__(self):
        if self.kind == "coefficient":
            if self.index is None:
                raise ValueError("coefficient projection needs an index")
        elif self.kind == "point":
            if self.x0 is None:
                raise ValueError("point evaluation needs x0")
        else:
            raise ValueError(f"unknown functional kind {self.kind!r}")

    def norm(self):
        return 1.0

    def row(self, f):
        """Pairing as a row vector acting on coefficient arrays of ``f``'s model."""
        if self.kind == "coefficient":
            if not isinstance(f, SpectralState):
                raise BackendMismatchError("coefficient projection needs a SpectralState")
            if not 0 <= self.index < f.coeffs.size:
                raise BackendMismatchError(f"index {self.index} outside spectrum")
            r = np.zeros(f.coeffs.size, dtype=complex)
            r[self.index] = 1.0
            return r
        if not isinstance(f, ExpSumSignal):
            raise BackendMismatchError("point evaluation needs an ExpSumSignal")
        return np.exp(1j * f.freqs * self.x0)


def coefficient_battery(f):
    return [DualFunctional("coefficient", index=j) for j in range(f.coeffs.size)]


def pair(f, g):
    """``<f, g*>``."""
    return complex(g.row(f) @ f.coeffs)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples ``e^{t_i D} f`` stored as a coefficient matrix (one row per time)."""

    times: np.ndarray
    coeffs: np.ndarray
    template: _DiagonalModel = field(repr=False)

    def __len__(self):
        return self.times.size

    def state(self, i):
        return self.template.with_coeffs(self.coeffs[i])

    def pair(self, g):
        return self.coeffs @ g.row(self.template)


def sample_trajectory(f, times):
    times = np.asarray(times, dtype=float).ravel()
    if not np.all(np.isfinite(times)):
        raise ValueError("sample times must be finite")
    coeffs = np.exp(1j * np.outer(times, f.freqs)) * f.coeffs
    return Trajectory(times, coeffs, f)


def random_spectral_state(rng, n=8, band=math.pi, include_edge=False):
    """Random state with ``n`` distinct eigenvalues in ``[-band, band]``.

    With ``include_edge`` one eigenvalue sits exactly at ``+band`` or
    ``-band`` so that ``sigma_f = band``.
    """
    lam = rng.uniform(-band, band, n)
    if include_edge:
        lam[0] = band * rng.choice([-1.0, 1.0])
    lam = np.unique(lam)
    while lam.size < n:
        lam = np.unique(np.concatenate([lam, rng.uniform(-band, band, n - lam.size)]))
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return SpectralState(Spectrum(lam), c)


def _parse_complex_list(raw, what):
    out = []
    for item in raw:
        if isinstance(item, (int, float)) and not isinstance(item, bool):
            out.append(complex(item))
        elif isinstance(item, (list, tuple)) and len(item) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in item
        ):
            out.append(complex(item[0], item[1]))
        else:
            raise ParseError(f"{what}: expected a number or [re, im], got {item!r}")
    return out


def state_from_dict(data):
    """Build a state from a problem-file object.

    ``{"spectrum": [...], "coeffs": [[re, im], ...]}`` gives a
    :class:`SpectralState`; ``{"freqs": [...], "coeffs": [...], "window": L}``
    gives an :class:`ExpSumSignal`.
    """
    if not isinstance(data, dict):
        raise ParseError("state must be a JSON object")
    if "coeffs" not in data or not isinstance(data["coeffs"], list):
        raise ParseError("state needs a 'coeffs' list")
    coeffs = _parse_complex_list(data["coeffs"], "coeffs")
    try:
        if "spectrum" in data:
            return SpectralState(Spectrum(np.asarray(data["spectrum"], dtype=float)), coeffs)
        if "freqs" in data:
            kwargs = {}
            if "window" in data:
                kwargs["window"] = float(data["window"])
            if "grid_density" in data:
                kwargs["grid_density"] = float(data["grid_density"])
            return ExpSumSignal(np.asarray(data["freqs"], dtype=float), coeffs, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError("state needs either 'spectrum' or 'freqs'")


def state_to_dict(f):
    coeffs = [[float(c.real), float(c.imag)] for c in f.coeffs]
    if isinstance(f, SpectralState):
        return {"spectrum": f.freqs.tolist(), "coeffs": coeffs}
    return {"freqs": f.freqs.tolist(), "coeffs": coeffs, "window": f.window,
            "grid_density": f.grid_density}


def load_state(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(data)
