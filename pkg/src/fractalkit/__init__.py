"""Numerics for Dirichlet forms, resolvents, and kernel estimates on
post-critically finite self-similar structures.

The library builds refinement graphs of a self-similar structure, solves
boundary-layer eigenfields and resolvent kernels on them, measures chemical
distances on resistance partitions, and checks the quantitative behavior
(power laws, decay envelopes, sub-Gaussian heat bounds, sector estimates)
through contour functional calculus and one-shot verification suites.
"""

from .blowups import BlowupAddress, blowup_convergence, blowup_kernel, halfline_oracle
from .eigenfields import (
    eta_decay_profile,
    eta_fields,
    eta_integral,
    eta_integral_fit,
    junction_green,
    junction_matrix,
    psi_fields,
)
from .graphs import LevelGraph, build_level_graph, clear_caches
from .kernels import (
    KernelGrid,
    check_gates,
    complex_power_kernel,
    exp_complex_kernel,
    exp_contour,
    heat_contour,
    heat_kernel,
    heat_pair_sample,
    heat_symbol,
    operator_kernel,
    power_contour,
    verify_heat_upper,
)
from .operators import (
    Spectrum,
    effective_resistance,
    energy,
    harmonic,
    laplacian_apply,
    normal_derivative,
    spectrum,
    weyl_fit,
)
from .partitions import (
    PartitionMetric,
    estimate_gamma,
    k_of_lambda,
    partition_at_scale,
    partition_metric,
)
from .report import CheckResult, VerificationReport
from .resolvent import (
    SeriesResult,
    neumann_resolvent,
    resolvent_direct,
    resolvent_series,
    resolvent_spectral,
)
from .sectors import (
    DoublingModel,
    SCMap,
    im_part_sandwich,
    pl_classical_envelope,
    power_map,
    tau_sequence,
    verify_sector_estimates,
)
from .specs import FractalSpec, Point, builtin, gasket, interval, load_spec
from .util import (
    CapacityError,
    ConfigError,
    GateError,
    ModelError,
    SingularityError,
)
from .verify import SUITE_NAMES, run_suite, verify_all

__version__ = "0.1.0"

__all__ = [
    "BlowupAddress",
    "CapacityError",
    "CheckResult",
    "ConfigError",
    "DoublingModel",
    "FractalSpec",
    "GateError",
    "KernelGrid",
    "LevelGraph",
    "ModelError",
    "PartitionMetric",
    "Point",
    "SCMap",
    "SeriesResult",
    "SingularityError",
    "Spectrum",
    "SUITE_NAMES",
    "VerificationReport",
    "blowup_convergence",
    "blowup_kernel",
    "build_level_graph",
    "builtin",
    "check_gates",
    "clear_caches",
    "complex_power_kernel",
    "effective_resistance",
    "energy",
    "estimate_gamma",
    "eta_decay_profile",
    "eta_fields",
    "eta_integral",
    "eta_integral_fit",
    "exp_complex_kernel",
    "exp_contour",
    "gasket",
    "halfline_oracle",
    "harmonic",
    "heat_contour",
    "heat_kernel",
    "heat_pair_sample",
    "heat_symbol",
    "im_part_sandwich",
    "interval",
    "junction_green",
    "junction_matrix",
    "k_of_lambda",
    "laplacian_apply",
    "load_spec",
    "neumann_resolvent",
    "normal_derivative",
    "operator_kernel",
    "partition_at_scale",
    "partition_metric",
    "pl_classical_envelope",
    "power_contour",
    "power_map",
    "psi_fields",
    "resolvent_direct",
    "resolvent_series",
    "resolvent_spectral",
    "run_suite",
    "spectrum",
    "tau_sequence",
    "verify_all",
    "verify_heat_upper",
    "verify_sector_estimates",
    "weyl_fit",
]
