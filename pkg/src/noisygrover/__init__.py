"""Grover search under time-correlated local unitary noise.

Exact density-matrix simulation of the noisy search dynamics (collisional
construction with a classical walker register), closed-form results for
the position-independent "good noise" family, unitary dilations of the
collision step with pure or thermal ancillas, and discrete-time
non-Markovianity witnesses.
"""

from .grover import (
    GroverInstance,
    grover_operator,
    ideal_success_closed_form,
    ideal_success_series,
    marked_state,
    optimal_iterations,
    uniform_superposition,
)
from .linalg import (
    DensityReport,
    InvariantViolation,
    assert_density,
    partial_trace,
    projector,
    random_density,
    require_density,
    tensor,
    trace_distance,
    trace_norm,
)
from .markov import (
    ConditionalProbs,
    EvolutionTrace,
    MarkovNoiseParams,
    conditional_probs,
    history_oracle,
    initial_joint_state,
    markov_evolve,
    perfect_memory_analytic,
    perfect_memory_first_max,
)
from .noise import (
    NoiseClass,
    NoiseClassTag,
    NoiseSpec,
    SingleQubitUnitary,
    build_chi,
    classify_noise,
    closed_form_overlaps,
    noise_spec,
    noise_unitary,
    noisy_grover,
    sigma_x_reduced,
    sigma_y_p2,
    single_qubit_unitary,
    w_prime,
)
from .collision import (
    DilationReport,
    DilationUnitary,
    FactorizationReport,
    KrausSet,
    ThermalBathParams,
    apply_kraus,
    channel_maps,
    collision_evolve,
    dilation_unitary,
    extract_m,
    kraus_from_dilation,
    kraus_step,
    thermal_kraus,
    thermal_weights,
    verify_dilation,
)
from .measures import (
    MeasureResult,
    StatePair,
    SweepPoint,
    blp_pair,
    n_blp,
    n_cp,
    positive_increment_sum,
    temperature_sweep,
)

__version__ = "0.1.0"
