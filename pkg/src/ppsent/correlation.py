"""Slot density matrices, the ensemble-averaged density matrix and correlation functions.

Correlations are computed three ways:

* ``E_time``: average over slots of the product of single-field expectations;
* ``E_trace``: trace of the ensemble-averaged density matrix against the
  tensor-product correlation operator;
* ``E_formula``: closed form from label algebra alone. Expanding the product
  of cosines over sign patterns, a term survives the slot average iff its
  signed sum of relative labels is the zero label (balance kills the rest).

All three are scaled by ``1 / C`` with ``C = 2**(1 - F)``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from . import _accel
from .galois import DEFAULT_TOL
from .states import FieldState, GeneralState, tensor_product


class UnbalancedFieldWarning(UserWarning):
    """The cos(theta + gamma_k) identity needs equal-magnitude mode amplitudes."""


def normalization(F: int) -> float:
    return 2.0 ** (1 - F)


@dataclass(frozen=True)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermitian_dev(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.entries)))

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        return (self.hermitian_dev() <= 1e-12
                and abs(self.trace() - 1) <= tol
                and self.min_eigenvalue() >= -tol)


def _as_general(state) -> GeneralState:
    if isinstance(state, GeneralState):
        return state
    if isinstance(state, FieldState):
        return tensor_product([state])
    return tensor_product(list(state))


def slot_density(state, k: int) -> DensityMatrix:
    v = _as_general(state).slot_vector(k)
    return DensityMatrix(np.outer(v, v.conj()))


def mean_reduced_density(state) -> DensityMatrix:
    """Arithmetic mean of the slot density matrices, ascending slot order."""
    vecs = np.ascontiguousarray(_as_general(state).slot_vectors())
    return DensityMatrix(_accel.mean_outer(vecs))


def single_operator(theta: float) -> np.ndarray:
    return np.array([[0, np.exp(1j * theta)], [np.exp(-1j * theta), 0]], dtype=np.complex128)


@dataclass(frozen=True)
class CorrelationOperator:
    angles: tuple[float, ...]

    @property
    def matrix(self) -> np.ndarray:
        return reduce(np.kron, (single_operator(t) for t in self.angles))


def correlation_trace(state, angles: Sequence[float]) -> float:
    """(1/C) Tr[rho_avg P(angles)]."""
    g = _as_general(state)
    if len(angles) != g.F:
        raise ValueError(f"need {g.F} angles, got {len(angles)}")
    rho = mean_reduced_density(g)
    val = np.trace(rho.entries @ CorrelationOperator(tuple(angles)).matrix)
    return float(val.real) / normalization(g.F)


def slot_traces(state, angles: Sequence[float]) -> np.ndarray:
    """Tr[rho_k P] for each slot k."""
    g = _as_general(state)
    p_mat = CorrelationOperator(tuple(angles)).matrix
    v = g.slot_vectors()
    return np.einsum("ki,ij,kj->k", v.conj(), p_mat, v).real


def _cross_terms(fields: Sequence[FieldState]) -> np.ndarray:
    """conj(mode0) * mode1 per field per slot, shape (F, L)."""
    return np.stack([np.conj(v[:, 0]) * v[:, 1] for v in (f.slot_vectors() for f in fields)])


def _is_balanced(f: FieldState) -> bool:
    return f.is_simple and abs(abs(f.modes[0][0][0]) - abs(f.modes[1][0][0])) <= DEFAULT_TOL


def slot_expectation(field: FieldState, theta: float, k: int) -> float:
    """<psi_k| P(theta) |psi_k> at one slot."""
    if not _is_balanced(field):
        warnings.warn("field is not a balanced one-term-per-mode state; "
                      "value is exact but the cos(theta + gamma_k) form does not apply",
                      UnbalancedFieldWarning, stacklevel=2)
    v = field.slot_vector(k)
    return float(2.0 * (np.conj(v[0]) * v[1] * np.exp(1j * theta)).real)


def correlation_grid(fields: Sequence[FieldState], angles: np.ndarray) -> np.ndarray:
    """E_time for many angle tuples at once; ``angles`` has shape (M, F)."""
    angles = np.atleast_2d(np.asarray(angles, dtype=np.float64))
    if angles.shape[1] != len(fields):
        raise ValueError(f"need {len(fields)} angles per row, got {angles.shape[1]}")
    cross = _cross_terms(fields)
    vals = _accel.slot_products(np.ascontiguousarray(cross.real),
                                np.ascontiguousarray(cross.imag),
                                np.ascontiguousarray(angles))
    return vals / normalization(len(fields))


def correlation_formula(fields: Sequence[FieldState], angles: Sequence[float]) -> float | None:
    """Closed form from label algebra; None when a field has several terms per mode."""
    if not all(f.is_simple for f in fields):
        return None
    n = len(fields)
    zero = fields[0].pps.zero
    rels = [f.relative_label() for f in fields]
    weight = 1.0
    offsets = []
    for f, theta in zip(fields, angles):
        a0, a1 = f.modes[0][0][0], f.modes[1][0][0]
        weight *= 2 * abs(a0) * abs(a1)
        offsets.append(theta + float(np.angle(np.conj(a0) * a1)))
    total = 0.0
    for tail in itertools.product((1, -1), repeat=n - 1):
        eps = (1,) + tail
        lab = zero
        for e, r in zip(eps, rels):
            lab = lab + e * r
        if lab.is_zero():
            total += math.cos(sum(e * x for e, x in zip(eps, offsets)))
    return weight * total


@dataclass(frozen=True)
class CorrelationResult:
    E_time: float
    E_trace: float
    E_formula: float | None
    C: float

    def paths_agree(self, tol: float = DEFAULT_TOL) -> bool:
        ok = abs(self.E_time - self.E_trace) <= tol
        if self.E_formula is not None:
            ok = ok and abs(self.E_time - self.E_formula) <= tol
        return ok


def correlation_time_average(fields: Sequence[FieldState], angles: Sequence[float]) -> CorrelationResult:
    if len(angles) != len(fields):
        raise ValueError(f"need {len(fields)} angles, got {len(angles)}")
    e_time = float(correlation_grid(fields, np.asarray([angles]))[0])
    e_trace = correlation_trace(tensor_product(list(fields)), angles)
    return CorrelationResult(e_time, e_trace, correlation_formula(fields, angles),
                             normalization(len(fields)))


@dataclass(frozen=True)
class ChshResult:
    E_ab: float
    E_ab_prime: float
    E_a_prime_b_prime: float
    E_a_prime_b: float

    @property
    def B(self) -> float:
        return self.E_ab - self.E_ab_prime + self.E_a_prime_b_prime + self.E_a_prime_b

    @property
    def abs_B(self) -> float:
        return abs(self.B)

    def as_dict(self) -> dict:
        return {"E_ab": self.E_ab, "E_ab_prime": self.E_ab_prime,
                "E_a_prime_b_prime": self.E_a_prime_b_prime, "E_a_prime_b": self.E_a_prime_b,
                "B": self.B, "abs_B": self.abs_B}


def chsh(fields: Sequence[FieldState], theta_a: float, theta_a_prime: float,
         theta_b: float, theta_b_prime: float) -> ChshResult:
    if len(fields) != 2:
        raise ValueError(f"CHSH needs two fields, got {len(fields)}")
    grid = np.array([[theta_a, theta_b], [theta_a, theta_b_prime],
                     [theta_a_prime, theta_b_prime], [theta_a_prime, theta_b]])
    e = correlation_grid(fields, grid)
    return ChshResult(*(float(x) for x in e))


def chsh_scan(fields: Sequence[FieldState], quads: np.ndarray) -> np.ndarray:
    """|B| for each row (theta_a, theta_a', theta_b, theta_b') of ``quads``."""
    quads = np.asarray(quads, dtype=np.float64)
    a, ap, b, bp = quads.T
    pairs = np.concatenate([np.stack(x, axis=1) for x in ((a, b), (a, bp), (ap, bp), (ap, b))])
    e = correlation_grid(fields, pairs).reshape(4, -1)
    return np.abs(e[0] - e[1] + e[2] + e[3])


@dataclass(frozen=True)
class GhzSignReport:
    E: float
    sign: int
    predicted: float
    predicted_sign: int

    @property
    def nonlocal_consistent(self) -> bool:
        return self.sign == self.predicted_sign

    @property
    def classification(self) -> str:
        return "nonlocal-consistent" if self.nonlocal_consistent else "inconsistent"

    def as_dict(self) -> dict:
        return {"E": self.E, "sign": self.sign, "predicted": self.predicted,
                "predicted_sign": self.predicted_sign, "classification": self.classification}


def _sign(x: float, tol: float) -> int:
    return 0 if abs(x) <= tol else (1 if x > 0 else -1)


def ghz_sign_criterion(fields: Sequence[FieldState], angles: Sequence[float],
                       tol: float = DEFAULT_TOL) -> GhzSignReport:
    if len(fields) < 3:
        raise ValueError("the GHZ sign test needs at least three fields")
    res = correlation_time_average(fields, angles)
    predicted = math.cos(sum(angles))
    return GhzSignReport(res.E_time, _sign(res.E_time, tol), predicted, _sign(predicted, tol))
