"""Line-search-free adaptive accelerated gradient method with rate certificates."""

from .diagnostics import (
    CERTIFICATE_KINDS,
    EnergyInputs,
    RateCertificate,
    certify,
    energy,
    fitted_energy_contraction,
    format_certificates,
    initial_D,
    phi,
    phi_alt,
    rho,
    write_violations_csv,
)
from .problems import (
    SmoothProblem,
    check_grad_fd,
    load_matrix_csv,
    make_log_sum_exp,
    make_logistic,
    make_quadratic,
    make_symmetric_log_sum_exp,
)
from .schedule import (
    PROFILES,
    AlgoParams,
    NonConvexInputError,
    ScheduleState,
    advance_step,
    default_params,
    floor_q,
    get_profile,
    init_schedule,
    local_smoothness,
    next_t,
    validate_params,
)
from .solver import (
    DivergenceError,
    StopCriteria,
    Trace,
    TraceRecord,
    read_trace_csv,
    run_adaagm,
    run_gd,
    run_nesterov,
    write_trace_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
