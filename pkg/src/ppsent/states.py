"""Labelled superposition states of classical fields and their tensor products.

A field carries two orthogonal modes. Every amplitude is tagged with the label
of the phase sequence modulating it; instantiating a state at slot ``k``
multiplies each amplitude by that sequence's k-th phasor and yields an
ordinary complex vector. Slot instantiation is the ground truth every
closed-form result in this package is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .galois import DEFAULT_TOL, FieldElement, PpsSet

Term = tuple[complex, FieldElement]


class NormalizationError(ValueError):
    pass


class IncompatibleSetError(ValueError):
    pass


class UnsupportedFormError(ValueError):
    pass


def _same_set(a: PpsSet, b: PpsSet):
    if not a.is_compatible(b):
        raise IncompatibleSetError("states are built on different sequence sets")


@dataclass(frozen=True, eq=False)
class FieldState:
    """One field: ``modes[m]`` is a tuple of (amplitude, label) terms for mode m."""

    modes: tuple[tuple[Term, ...], tuple[Term, ...]]
    pps: PpsSet = field(repr=False)

    def __post_init__(self):
        modes = tuple(tuple((complex(a), self.pps.check_label(lab)) for a, lab in m)
                      for m in self.modes)
        if len(modes) != 2:
            raise ValueError("a field has exactly two modes")
        for m in modes:
            labels = [lab for _, lab in m]
            if len(set(labels)) != len(labels):
                raise ValueError("labels within one mode must be distinct")
        object.__setattr__(self, "modes", modes)
        if abs(self.norm() - 1.0) > DEFAULT_TOL:
            raise NormalizationError(f"field state norm {self.norm():.12g} != 1")

    def norm(self) -> float:
        # distinct labels within a mode are orthogonal under the ensemble average
        return sum(abs(a) ** 2 for m in self.modes for a, _ in m)

    def __eq__(self, other):
        if not isinstance(other, FieldState):
            return NotImplemented
        return self.modes == other.modes and self.pps.is_compatible(other.pps)

    @property
    def is_simple(self) -> bool:
        """Exactly one term per mode (the form the mode exchanger accepts)."""
        return all(len(m) == 1 for m in self.modes)

    @property
    def own_label(self) -> FieldElement:
        for m in self.modes:
            if m:
                return m[0][1]
        return self.pps.zero

    def relative_label(self) -> FieldElement:
        """Label of the mode-1 phase relative to mode 0 (the RPS)."""
        if not self.is_simple:
            raise UnsupportedFormError("relative phase needs one term per mode")
        return self.modes[1][0][1] - self.modes[0][0][1]

    def slot_vector(self, k: int) -> np.ndarray:
        _check_slot(self.pps, k)
        out = np.zeros(2, dtype=np.complex128)
        for mode, terms in enumerate(self.modes):
            for amp, lab in terms:
                out[mode] += amp * self.pps.phasors[lab.index(), k]
        return out

    def slot_vectors(self) -> np.ndarray:
        """All slots at once, shape (L, 2)."""
        out = np.zeros((self.pps.L, 2), dtype=np.complex128)
        for mode, terms in enumerate(self.modes):
            for amp, lab in terms:
                out[:, mode] += amp * self.pps.phasors[lab.index()]
        return out


def make_field_state(alpha: complex, beta: complex, label: FieldElement, pps: PpsSet,
                     tol: float = DEFAULT_TOL) -> FieldState:
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"|alpha|^2 + |beta|^2 = {norm:.12g}, expected 1")
    return FieldState((((alpha, label),), ((beta, label),)), pps)


def general_field_state(mode0: Sequence[Term], mode1: Sequence[Term], pps: PpsSet) -> FieldState:
    """Field with several labelled terms per mode."""
    return FieldState((tuple(mode0), tuple(mode1)), pps)


def _check_slot(pps: PpsSet, k: int):
    if not 0 <= k < pps.L:
        raise IndexError(f"slot {k} outside [0, {pps.L})")


def inner_product(x: FieldState, y: FieldState) -> complex:
    """Ensemble inner product, evaluated as the slot average of <x_k|y_k>."""
    _same_set(x.pps, y.pps)
    vx, vy = x.slot_vectors(), y.slot_vectors()
    return complex(np.sum(vx.conj() * vy) / x.pps.L)


def inner_product_analytic(x: FieldState, y: FieldState) -> complex:
    """Closed form: only terms with equal labels in the same mode contribute."""
    _same_set(x.pps, y.pps)
    total = 0j
    for mx, my in zip(x.modes, y.modes):
        ylab = {lab: a for a, lab in my}
        for a, lab in mx:
            if lab in ylab:
                total += a.conjugate() * ylab[lab]
    return total


def _bits(n: int, f: int) -> tuple[int, ...]:
    return tuple((n >> (f - 1 - j)) & 1 for j in range(f))


@dataclass(frozen=True, eq=False)
class GeneralState:
    """Multi-field state: (bits, label) -> coefficient, all labels relative to ``global_label``.

    ``bits[0]`` is field 0, which is the most significant index of dense vectors.
    """

    F: int
    global_label: FieldElement
    coefficients: dict
    pps: PpsSet = field(repr=False)

    def __post_init__(self):
        for (bits, lab) in self.coefficients:
            if len(bits) != self.F or any(b not in (0, 1) for b in bits):
                raise ValueError(f"bad bitstring {bits} for F={self.F}")
            self.pps.check_label(lab)
        if len(self.coefficients) > self.pps.L * 2 ** self.F:
            raise ValueError("more coefficients than basis states")

    @property
    def dim(self) -> int:
        return 2 ** self.F

    def entries(self):
        return sorted(self.coefficients.items(), key=lambda kv: (kv[0][0], kv[0][1].coeffs))

    def full_label(self, lab: FieldElement) -> FieldElement:
        return self.global_label + lab

    def partition_counts(self) -> tuple[int, int]:
        """(#bitstrings with only identity-label terms, #bitstrings with some other label)."""
        ident, other = set(), set()
        for bits, lab in self.coefficients:
            (ident if lab.is_zero() else other).add(bits)
        return len(ident - other), len(other)

    def slot_vector(self, k: int) -> np.ndarray:
        _check_slot(self.pps, k)
        return self.slot_vectors()[k]

    def slot_vectors(self) -> np.ndarray:
        """Dense amplitudes at every slot, shape (L, 2^F)."""
        out = np.zeros((self.pps.L, self.dim), dtype=np.complex128)
        for (bits, lab), c in self.entries():
            idx = int("".join(map(str, bits)), 2) if bits else 0
            out[:, idx] += c * self.pps.phasors[self.full_label(lab).index()]
        return out

    def norm(self) -> float:
        v = self.slot_vectors()
        return float(np.sum(np.abs(v) ** 2) / self.pps.L)


def tensor_product(fields: Sequence[FieldState]) -> GeneralState:
    if not fields:
        raise ValueError("need at least one field")
    pps = fields[0].pps
    for f in fields[1:]:
        _same_set(pps, f.pps)
    glob = pps.zero
    for f in fields:
        glob = glob + f.own_label
    acc = {((), pps.zero): 1 + 0j}
    for f in fields:
        nxt: dict = {}
        own = f.own_label
        for (bits, lab), c in acc.items():
            for mode, terms in enumerate(f.modes):
                for amp, flab in terms:
                    if amp == 0:
                        continue
                    key = (bits + (mode,), lab + (flab - own))
                    nxt[key] = nxt.get(key, 0j) + c * amp
        acc = nxt
    return GeneralState(len(fields), glob, acc, pps)


def instantiate_slot(state, k: int) -> np.ndarray:
    return state.slot_vector(k)


@dataclass(frozen=True)
class UnitaryGate:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise ValueError("gate must be 2x2")
        if not np.allclose(m @ m.conj().T, np.eye(2), atol=1e-12, rtol=0):
            raise ValueError("matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


_S2 = 1 / math.sqrt(2)
IDENTITY = UnitaryGate(np.eye(2))
NOT = UnitaryGate(np.array([[0, 1], [1, 0]]))
HADAMARD = UnitaryGate(np.array([[_S2, _S2], [_S2, -_S2]]))


def apply_unitary(state: GeneralState, field_index: int, gate: UnitaryGate) -> GeneralState:
    """new[.., i', ..] = sum_i U[i', i] old[.., i, ..]; labels are untouched."""
    if not isinstance(gate, UnitaryGate):
        gate = UnitaryGate(gate)
    if not 0 <= field_index < state.F:
        raise IndexError(f"field {field_index} outside [0, {state.F})")
    u = gate.matrix
    out: dict = {}
    for (bits, lab), c in state.coefficients.items():
        i = bits[field_index]
        for j in (0, 1):
            if u[j, i] == 0:
                continue
            nb = bits[:field_index] + (j,) + bits[field_index + 1:]
            out[(nb, lab)] = out.get((nb, lab), 0j) + u[j, i] * c
    out = {k: v for k, v in out.items() if v != 0}
    return GeneralState(state.F, state.global_label, out, state.pps)


def apply_unitary_field(f: FieldState, gate: UnitaryGate) -> FieldState:
    """Per-field version of :func:`apply_unitary` (amplitudes regrouped by label)."""
    u = gate.matrix
    by_label: dict = {}
    for mode, terms in enumerate(f.modes):
        for amp, lab in terms:
            for j in (0, 1):
                if u[j, mode] != 0:
                    d = by_label.setdefault(lab, [None, None])
                    d[j] = (d[j] or 0j) + u[j, mode] * amp
    order = _label_order(f)
    modes = tuple(tuple((by_label[lab][j], lab) for lab in order
                        if lab in by_label and by_label[lab][j] is not None)
                  for j in (0, 1))
    return FieldState(modes, f.pps)


def _label_order(f: FieldState):
    seen = []
    for m in f.modes:
        for _, lab in m:
            if lab not in seen:
                seen.append(lab)
    return seen


def apply_slot_gate(vec: np.ndarray, field_index: int, gate: UnitaryGate) -> np.ndarray:
    """Apply a one-field gate to a dense slot vector (field 0 most significant)."""
    f = int(round(math.log2(vec.shape[0])))
    t = vec.reshape((2,) * f)
    t = np.tensordot(gate.matrix, t, axes=([1], [field_index]))
    t = np.moveaxis(t, 0, field_index)
    return t.reshape(-1)


def mode_exchange(fields: Sequence[FieldState], source: Sequence[int] | None = None) -> list[FieldState]:
    """Swap mode-1 terms between fields: field j receives field ``source[j]``'s mode-1 term.

    ``source`` must be a permutation; the default is the cycle j <- j+1.
    """
    n = len(fields)
    if source is None:
        source = [(j + 1) % n for j in range(n)]
    source = list(source)
    if sorted(source) != list(range(n)):
        raise ValueError(f"{source} is not a permutation of 0..{n - 1}")
    for f in fields:
        if not f.is_simple:
            raise UnsupportedFormError("mode exchange needs one (amplitude, label) term per mode")
    for f in fields[1:]:
        _same_set(fields[0].pps, f.pps)
    return [FieldState((f.modes[0], fields[src].modes[1]), f.pps)
            for f, src in zip(fields, source)]


def relative_labels(fields: Sequence[FieldState]) -> list[FieldElement]:
    return [f.relative_label() for f in fields]
