"""Ready-made preparations: the four Bell states, N-party GHZ states, the NOT-gate demo."""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .galois import FieldElement, PpsParams, PpsSet, build_pps_set
from .states import (NOT, FieldState, apply_slot_gate, apply_unitary, apply_unitary_field,
                     make_field_state, mode_exchange, tensor_product)

_S2 = 1 / math.sqrt(2)

# candidate label orderings tried before giving up on an admissible GHZ assignment
SEARCH_BUDGET = 50_000


class CapacityError(ValueError):
    pass


class DegeneratePreparationError(ValueError):
    pass


class InadmissibleLabelsWarning(UserWarning):
    """Some signed sum of relative labels vanishes, so extra cosine terms survive averaging."""


class BellKind(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @classmethod
    def parse(cls, text: str) -> "BellKind":
        t = text.strip().lower()
        for sym, name in (("ψ", "psi"), ("φ", "phi"), ("⁺", "+"), ("⁻", "-")):
            t = t.replace(sym, name)
        for kind in cls:
            if kind.value == t:
                return kind
        raise ValueError(f"unknown Bell variant {text!r}; expected one of psi+, psi-, phi+, phi-")


def bell_closed_form(kind: BellKind, theta_a: float, theta_b: float) -> float:
    return {
        BellKind.PSI_PLUS: math.cos(theta_a + theta_b),
        BellKind.PSI_MINUS: -math.cos(theta_a + theta_b),
        BellKind.PHI_PLUS: math.cos(theta_a - theta_b),
        BellKind.PHI_MINUS: -math.cos(theta_a - theta_b),
    }[kind]


def _check_capacity(pps_or_params, F: int):
    L = pps_or_params.L
    if L - 1 < F:
        raise CapacityError(f"{F} fields need {F} distinct nonzero labels: "
                            f"requires p^s - 1 >= F, have p^s - 1 = {L - 1}")


def _balanced_fields(pps: PpsSet, labels: Sequence[FieldElement]) -> list[FieldState]:
    return [make_field_state(_S2, _S2, lab, pps) for lab in labels]


def _with_mode1_phase(f: FieldState, factor: complex) -> FieldState:
    (a1, lab1), = f.modes[1]
    return FieldState((f.modes[0], ((a1 * factor, lab1),)), f.pps)


def prepare_bell(kind: BellKind | str, pps: PpsSet, label_a: FieldElement | None = None,
                 label_b: FieldElement | None = None) -> list[FieldState]:
    if isinstance(kind, str):
        kind = BellKind.parse(kind)
    if label_a is None or label_b is None:
        _check_capacity(pps, 2)
        default = pps.nonzero_labels()
        label_a = default[0] if label_a is None else label_a
        label_b = default[1] if label_b is None else label_b
    if label_a == label_b:
        raise DegeneratePreparationError("equal labels give an all-zero relative phase sequence")
    if label_a.is_zero() or label_b.is_zero():
        raise DegeneratePreparationError("Bell preparation needs nonzero labels")
    fa, fb = mode_exchange(_balanced_fields(pps, [label_a, label_b]), [1, 0])
    if kind in (BellKind.PSI_MINUS, BellKind.PHI_MINUS):
        fb = _with_mode1_phase(fb, -1)
    if kind in (BellKind.PHI_PLUS, BellKind.PHI_MINUS):
        fb = apply_unitary_field(fb, NOT)
    return [fa, fb]


def _bad_patterns(pps: PpsSet, rel_labels: Sequence[FieldElement]) -> int:
    """Number of non-constant sign patterns whose signed sum of labels is zero."""
    n = len(rel_labels)
    coeffs = np.array([lab.coeffs for lab in rel_labels], dtype=np.int64)
    eps = np.array([(1,) + t for t in itertools.product((1, -1), repeat=n - 1)], dtype=np.int64)
    sums = (eps @ coeffs) % pps.p
    zero_rows = ~np.any(sums, axis=1)
    return int(np.count_nonzero(zero_rows[1:]))  # row 0 is the all-plus pattern


def ghz_admissible(pps: PpsSet, labels: Sequence[FieldElement]) -> bool:
    """True iff the cyclic exchange over ``labels`` leaves only the all-plus cosine term."""
    n = len(labels)
    rels = [labels[(j + 1) % n] - labels[j] for j in range(n)]
    return _bad_patterns(pps, rels) == 0


def choose_ghz_labels(pps: PpsSet, F: int, budget: int = SEARCH_BUDGET) -> list[FieldElement]:
    """First F nonzero labels in antilog order, or the first admissible reordering/subset found."""
    _check_capacity(pps, F)
    nonzero = pps.nonzero_labels()
    first = nonzero[:F]
    if ghz_admissible(pps, first):
        return first
    tried = 0
    for subset in itertools.combinations(nonzero, F):
        # rotations of a cycle are equivalent: pin the first label
        for rest in itertools.permutations(subset[1:]):
            cand = [subset[0], *rest]
            if ghz_admissible(pps, cand):
                return cand
            tried += 1
            if tried >= budget:
                break
        if tried >= budget:
            break
    warnings.warn(f"no admissible GHZ label assignment for F={F} over GF({pps.p}^{pps.params.s}); "
                  "correlations will carry extra cosine terms", InadmissibleLabelsWarning, stacklevel=2)
    return first


def prepare_ghz(F: int, pps: PpsSet, labels: Sequence[FieldElement] | None = None) -> list[FieldState]:
    """Balanced fields with mode-1 terms cyclically exchanged: field j receives field j+1's."""
    if F < 3:
        raise ValueError("GHZ preparation needs at least three fields")
    if labels is None:
        labels = choose_ghz_labels(pps, F)
    else:
        _check_capacity(pps, F)
        labels = list(labels)
        if len(labels) != F:
            raise ValueError(f"need {F} labels, got {len(labels)}")
        if len(set(labels)) != F or any(lab.is_zero() for lab in labels):
            raise DegeneratePreparationError("GHZ labels must be distinct and nonzero")
    return mode_exchange(_balanced_fields(pps, labels))


@dataclass(frozen=True)
class NotGateReport:
    before: FieldState
    after: FieldState
    slot_path_dev: float      # per-slot NOT vs coefficient-law path
    expected_dev: float       # coefficient-law path vs e^{i lambda}(alpha|1> + beta|0>)
    slot_operations: int

    def as_dict(self) -> dict:
        return {
            "before": [[[a.real, a.imag, list(lab.coeffs)] for a, lab in m] for m in self.before.modes],
            "after": [[[a.real, a.imag, list(lab.coeffs)] for a, lab in m] for m in self.after.modes],
            "slot_path_dev": self.slot_path_dev,
            "expected_dev": self.expected_dev,
            "slot_operations": self.slot_operations,
        }


def not_gate_demo(pps: PpsSet, label: FieldElement | None = None,
                  alpha: complex = _S2, beta: complex = _S2) -> NotGateReport:
    label = pps.nonzero_labels()[0] if label is None else pps.check_label(label)
    before = make_field_state(alpha, beta, label, pps)
    # path 1: decompose into phase units, flip each slot vector
    per_slot = np.array([apply_slot_gate(before.slot_vector(k), 0, NOT) for k in range(pps.L)])
    # path 2: coefficient law on the labelled state, then instantiate
    coeff = apply_unitary(tensor_product([before]), 0, NOT).slot_vectors()
    expected = make_field_state(beta, alpha, label, pps).slot_vectors()
    return NotGateReport(
        before=before,
        after=apply_unitary_field(before, NOT),
        slot_path_dev=float(np.max(np.abs(per_slot - coeff))),
        expected_dev=float(np.max(np.abs(coeff - expected))),
        slot_operations=pps.L,
    )


@dataclass(frozen=True)
class ResourceReport:
    field_count: int
    sequences_used: int
    sequence_length: int
    slot_operations: int
    per_field_terms: int
    dense_amplitudes: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def resource_report(F: int, params: PpsParams, pps: PpsSet | None = None) -> ResourceReport:
    """Resources for an F-party exchanged preparation; the term count is measured, not assumed."""
    _check_capacity(params, F)
    pps = build_pps_set(params) if pps is None else pps
    labels = pps.nonzero_labels()[:F]
    fields = mode_exchange(_balanced_fields(pps, labels))
    used = {lab for f in fields for m in f.modes for _, lab in m}
    return ResourceReport(
        field_count=F,
        sequences_used=len(used),
        sequence_length=params.L,
        slot_operations=params.L,
        per_field_terms=sum(len(m) for f in fields for m in f.modes),
        dense_amplitudes=2 ** F,
    )
