"""Direct Pauli-transfer-matrix reconstruction (DPTM) and standard process
tomography (sQPT) for dense n-qubit channel simulations."""

__version__ = "0.1.0"

from .pauli import (
    PauliString,
    devectorize,
    pauli_expectation,
    pauli_matrix,
    validate_density_matrix,
    vectorize,
)
from .channels import (
    ChannelError,
    ChoiMatrix,
    KrausChannel,
    PauliTransferMatrix,
    amplitude_damping,
    bit_flip,
    build_model,
    choi_to_kraus,
    compose_ptm,
    correlated_depolarizing,
    correlated_pauli,
    depolarizing,
    is_pauli_channel,
    kraus_apply,
    kraus_to_choi,
    kraus_to_ptm,
    phase_flip,
    ptm_apply,
    ptm_to_choi,
    random_channel,
    validate_cptp,
)
from .states import (
    Protocol,
    StateFamily,
    beta_matrix,
    dptm_state,
    prep_channel_builtin,
    prep_channel_solve,
    sqpt_state,
    state_family,
)
from .planning import Configuration, Prior, entry_cost, plan_configurations
from .tomography import (
    Estimate,
    TomographyResult,
    exact_expectation,
    extract_corr_depol_params,
    reconstruct_dptm,
    reconstruct_sqpt,
    run_protocol,
    sample_configuration,
)
