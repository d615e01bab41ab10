"""Sparse recovery and subset selection via stepwise regression.

Backward elimination and magnitude pruning on an updatable QR factorization,
forward greedy baselines, two-stage replacement algorithms, computable
recovery certificates, synthetic instance generation, and an experiment
harness for phase-transition and stability studies.
"""

from .bench import (
    PhaseGrid,
    StabilityCurve,
    export_grid,
    export_stability,
    import_grid,
    load_config,
    naive_br,
    normal_br,
    run_phase_grid,
    run_stability,
)
from .certs import (
    CertificateReport,
    adaptive_stop_sparsity,
    babel,
    posthoc_check,
    sigma_min_active,
    recovery_bound,
)
from .errors import (
    ConfigError,
    InvalidConfig,
    InvalidOrder,
    InvalidSparsity,
    InvalidSpec,
    NumericalBreakdown,
    RankDeficient,
    SparseStepError,
    UnknownColumn,
    ZeroTarget,
)
from .greedy import (
    backward_regression,
    deletion_scores,
    forward_regression,
    lace,
    omp,
)
from .linalg import UpdatableQR, qr_init
from .model import (
    ActiveSet,
    Certificate,
    Dictionary,
    RecoveryOutcome,
    SparseSignal,
    r_squared,
    residual,
)
from .synth import (
    Instance,
    InstanceSpec,
    instance_seed,
    make_instance,
    make_matrix,
    make_noise,
    make_signal,
)
from .two_stage import SrrConfig, ompr, srr, subspace_pursuit

__all__ = [
    "ActiveSet",
    "Certificate",
    "CertificateReport",
    "ConfigError",
    "Dictionary",
    "Instance",
    "InstanceSpec",
    "InvalidConfig",
    "InvalidOrder",
    "InvalidSparsity",
    "InvalidSpec",
    "NumericalBreakdown",
    "PhaseGrid",
    "RankDeficient",
    "RecoveryOutcome",
    "SparseSignal",
    "SparseStepError",
    "SrrConfig",
    "StabilityCurve",
    "UnknownColumn",
    "UpdatableQR",
    "ZeroTarget",
    "adaptive_stop_sparsity",
    "babel",
    "backward_regression",
    "deletion_scores",
    "export_grid",
    "export_stability",
    "forward_regression",
    "import_grid",
    "instance_seed",
    "lace",
    "load_config",
    "make_instance",
    "make_matrix",
    "make_noise",
    "make_signal",
    "naive_br",
    "normal_br",
    "omp",
    "ompr",
    "posthoc_check",
    "qr_init",
    "r_squared",
    "residual",
    "run_phase_grid",
    "run_stability",
    "sigma_min_active",
    "srr",
    "subspace_pursuit",
    "recovery_bound",
]

__version__ = "0.1.0"
