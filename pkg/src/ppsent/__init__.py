"""Entanglement simulation with classical fields modulated by pseudorandom phase sequences."""

from .correlation import (ChshResult, CorrelationOperator, CorrelationResult, DensityMatrix,
                          chsh, chsh_scan, correlation_formula, correlation_grid,
                          correlation_time_average, correlation_trace, ghz_sign_criterion,
                          mean_reduced_density, slot_density, slot_expectation)
from .galois import (FieldElement, PhaseSequence, PpsParams, PpsSet, VerificationReport,
                     build_pps_set, generate_m_sequence, normalized_correlation,
                     sequence_product, verify_primitive, verify_properties)
from .protocols import (BellKind, ResourceReport, ghz_admissible, not_gate_demo, prepare_bell,
                        prepare_ghz, resource_report)
from .states import (HADAMARD, IDENTITY, NOT, FieldState, GeneralState, UnitaryGate,
                     apply_unitary, inner_product, instantiate_slot, make_field_state,
                     mode_exchange, tensor_product)

__version__ = "0.1.0"
