from .evolution import (
    EvolutionRun,
    collocated_energy,
    energy_drift,
    evolve_leapfrog,
    evolve_spectral_exact,
    fv_equation_residual,
    leapfrog_energy,
    leapfrog_error_vs_exact,
    parity_commutation_error,
    time_reversal_error,
    verify_fv_evolution,
)
from .jacobi import block_jacobi_eigenvalues, jacobi_eigenvalues
from .spectrum import (
    SpectrumEntry,
    SpectrumResult,
    analytic_k2,
    analytic_spectrum,
    evanescent_scan,
    fd_eigensolver,
    quantization_residual,
    solve_modes_family,
    stationary_mode_state,
    stencil_matrix,
)
from .nr_limit import NrPoint, NrReport, nr_limit_experiment, nr_point
from .convergence import observed_order, observed_orders
