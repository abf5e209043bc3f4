"""Sampling, interpolation and inverse formulas for one-parameter isometry
groups, realized on exact finite spectral models."""

from .boas import BoasConfig, boas_apply, boas_error, boas_sigma_invariance
from .coefficients import (
    boas_coeff_A,
    boas_coeff_B,
    coefficient_table,
    favard,
    favard_table,
    kolmogorov_constant,
    sinc_derivative,
)
from .diagnostics import jackson_ratio, kolmogorov_check, modulus_of_continuity, spectral_type
from .errors import SamplerError
from .irregular import (
    CanonicalProduct,
    g_eval,
    g_prime_at_node,
    irregular_recon_scalar,
    irregular_recon_vector,
    make_nodes,
    measurement_recovery,
)
from .models import (
    DualFunctional,
    ExpSumSignal,
    SpectralState,
    Spectrum,
    apply_generator,
    bernstein_membership,
    evolve,
    evolve_complex,
    norm,
    pair,
    spectral_truncation,
)
from .regular import (
    derivative_sampling,
    q_operator,
    recon_trajectory,
    recover_from_shift,
    recover_state,
    valiron_tschakaloff,
)
from .schrodinger import CauchyProblem, invert, round_trip, solve

__version__ = "0.1.0"
