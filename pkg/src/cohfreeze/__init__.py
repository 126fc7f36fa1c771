"""Frozen coherence under strictly incoherent operations.

Coherence measures (l1-norm and relative entropy), strictly incoherent
channels in generalized-permutation form, and operational plus structural
checks of when such a channel leaves the coherence of a state unchanged.
"""

import logging

from .checks import FreezeReport, check_frozen
from .errors import (
    CoherenceError,
    DimMismatch,
    DimTooLarge,
    EmptyKraus,
    HypothesisNotMet,
    NotComplete,
    NotDensityMatrix,
    NotGeneralizedPermutation,
    NotHermitian,
    NotPermutation,
    NotProbabilityVector,
    NotPSD,
    NotUnitary,
    NotXState,
    OutOfRange,
    SamplingExhausted,
    TheoremViolation,
)
from .freeze import (
    MixedUnitaryForm,
    MixedUnitaryTerm,
    StructuralResult,
    alignment_gaps,
    bistochastic_of,
    decompose_mixed_unitary,
    find_freezing_unitary,
    is_bistochastic,
    majorizes,
    omega_structural_check,
    phase_alignment_l1,
)
from .linalg import Permutation, conjugate, herm_eigenvalues, perm_matrix
from .measures import Measure, c_l1, c_re, coherence, dephase, entropy
from .oracle import SweepResult, bell_sweep, exhaustive_unitary_oracle, qubit_condition_sweep
from .sio import (
    SioChannel,
    SioKraus,
    apply,
    channel_from_dict,
    channel_to_dict,
    compose,
    identity_channel,
    local_bit_flip,
    qubit_freeze_channel,
    unitary_channel,
    validate_sio,
)
from .states import (
    StateClass,
    StateTag,
    bell_diagonal,
    classify,
    in_omega,
    in_omega_x,
    maximally_coherent,
    random_in_omega,
    random_state,
    random_x_state,
    state_from_dict,
    state_to_dict,
    support_set,
    validate_density_matrix,
)
from .xfreeze import (
    BlockKrausForm,
    ProbeReport,
    XDecomposition,
    decompose_x,
    omega_invariance_probe,
    pairing_permutation,
    parse_block_form,
    qutrit_form_channel,
    x_state_from_blocks,
    x_structural_check,
)

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
