"""GF(p^s) arithmetic, LFSR m-sequences and pseudorandom phase sequence sets.

Polynomials are coefficient lists with the leading (degree-s) coefficient
first, so ``x^3 + x + 1`` over GF(2) is ``[1, 0, 1, 1]``. Field elements are
stored in the polynomial basis {1, a, a^2, ...} of a root ``a`` of that
polynomial, lowest power first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _accel

DEFAULT_TOL = 1e-9

# Monic primitive polynomials, leading coefficient first. Always re-verified.
PRIMITIVE_POLYS = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 0, 1, 1),
    (2, 4): (1, 0, 0, 1, 1),
    (2, 5): (1, 0, 0, 1, 0, 1),
    (2, 6): (1, 0, 0, 0, 0, 1, 1),
    (2, 7): (1, 0, 0, 0, 0, 0, 1, 1),
    (3, 1): (1, 1),
    (3, 2): (1, 1, 2),
    (3, 3): (1, 0, 2, 1),
    (3, 4): (1, 0, 0, 1, 2),
    (5, 1): (1, 3),
    (5, 2): (1, 1, 2),
    (5, 3): (1, 0, 3, 2),
    (7, 1): (1, 4),
    (7, 2): (1, 1, 3),
}


class InvalidParameterError(ValueError):
    """Bad field parameters: non-prime modulus, non-monic or wrong-degree polynomial."""


class NotPrimitiveError(InvalidParameterError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PpsParams:
    p: int
    s: int
    poly: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise InvalidParameterError(f"p={self.p} is not prime")
        if self.s < 1:
            raise InvalidParameterError(f"s={self.s} must be >= 1")
        poly = tuple(int(c) for c in self.poly)
        if len(poly) != self.s + 1:
            raise InvalidParameterError(
                f"poly needs s+1={self.s + 1} coefficients, got {len(poly)}")
        if any(c < 0 or c >= self.p for c in poly):
            raise InvalidParameterError(f"poly coefficients must lie in [0, {self.p})")
        if poly[0] != 1:
            raise InvalidParameterError(f"poly {list(poly)} is not monic")
        object.__setattr__(self, "poly", poly)

    @classmethod
    def default(cls, p: int, s: int) -> "PpsParams":
        """Parameters with a primitive polynomial from the built-in table (or a search)."""
        if not is_prime(p):
            raise InvalidParameterError(f"p={p} is not prime")
        poly = PRIMITIVE_POLYS.get((p, s))
        if poly is None:
            poly = find_primitive_poly(p, s)
        return cls(p, s, poly)

    @property
    def L(self) -> int:
        return self.p ** self.s

    @property
    def taps(self) -> np.ndarray:
        """Low-order coefficients c_0..c_{s-1} of the recurrence polynomial."""
        return np.array(self.poly[:0:-1], dtype=np.int64)


@dataclass(frozen=True, order=True)
class FieldElement:
    coeffs: tuple[int, ...]
    p: int = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) % self.p for c in self.coeffs))

    @classmethod
    def zero(cls, p: int, s: int) -> "FieldElement":
        return cls((0,) * s, p)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.p)

    def __neg__(self) -> "FieldElement":
        return FieldElement(tuple(-a for a in self.coeffs), self.p)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, n: int) -> "FieldElement":
        return FieldElement(tuple(n * a for a in self.coeffs), self.p)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def index(self) -> int:
        """Base-p integer encoding, lowest coefficient least significant."""
        return sum(c * self.p ** i for i, c in enumerate(self.coeffs))

    def _check(self, other):
        if self.p != other.p or len(self.coeffs) != len(other.coeffs):
            raise InvalidParameterError("field elements from different fields")

    def __repr__(self):
        return f"FieldElement({list(self.coeffs)}, p={self.p})"


def _mul_by_root(v: list[int], params: PpsParams) -> list[int]:
    # a^s = -(c_0 + c_1 a + ... + c_{s-1} a^{s-1})
    p, s = params.p, params.s
    taps = params.taps
    top = v[s - 1]
    out = [0] + v[: s - 1]
    return [(out[i] - top * int(taps[i])) % p for i in range(s)]


def verify_primitive(params: PpsParams) -> bool:
    """True iff the LFSR for ``params.poly`` has full period p^s - 1."""
    seed = np.zeros(params.s, dtype=np.int64)
    seed[-1] = 1
    period = params.L - 1
    # one extra step so a longer cycle is never mistaken for the full one
    got = _accel.lfsr_period(params.taps, params.p, seed, period + 1)
    return int(got) == period


def find_primitive_poly(p: int, s: int) -> tuple[int, ...]:
    """Smallest monic primitive polynomial in lexicographic coefficient order."""
    for tail in itertools.product(range(p), repeat=s):
        if tail[-1] == 0:
            continue
        params = PpsParams(p, s, (1,) + tail)
        if verify_primitive(params):
            return params.poly
    raise InvalidParameterError(f"no primitive polynomial of degree {s} over GF({p})")


def generate_m_sequence(params: PpsParams) -> np.ndarray:
    """One period (length p^s - 1) of the maximal-length LFSR output."""
    if not verify_primitive(params):
        raise NotPrimitiveError(
            f"poly {list(params.poly)} is not primitive over GF({params.p}): "
            f"LFSR period differs from {params.L - 1}")
    seed = np.zeros(params.s, dtype=np.int64)
    seed[-1] = 1
    return _accel.lfsr_run(params.taps, params.p, seed, params.L - 1)


@dataclass(frozen=True)
class PhaseSequence:
    symbols: np.ndarray
    label: FieldElement

    @property
    def p(self) -> int:
        return self.label.p

    @property
    def phases(self) -> np.ndarray:
        return 2.0 * np.pi * self.symbols / self.p

    @property
    def phasors(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def __len__(self):
        return len(self.symbols)


def _root_of_unity_table(p: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(p) / p)


@dataclass(frozen=True, eq=False)
class PpsSet:
    """The full set of p^s padded phase sequences, indexed by field-element label.

    ``symbols[i]`` is the sequence whose label has ``FieldElement.index() == i``.
    """

    params: PpsParams
    symbols: np.ndarray

    def __post_init__(self):
        sym = np.array(self.symbols, dtype=np.int64)
        if sym.shape != (self.params.L, self.params.L):
            raise InvalidParameterError(
                f"symbol table must be {self.params.L}x{self.params.L}, got {sym.shape}")
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)

    @property
    def L(self) -> int:
        return self.params.L

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def zero(self) -> FieldElement:
        return FieldElement.zero(self.params.p, self.params.s)

    @cached_property
    def labels(self) -> list[FieldElement]:
        """All labels in index order (which is not lexicographic)."""
        p, s = self.params.p, self.params.s
        out = []
        for i in range(self.L):
            coeffs = [(i // p ** j) % p for j in range(s)]
            out.append(FieldElement(tuple(coeffs), p))
        return out

    @cached_property
    def antilog(self) -> list[FieldElement]:
        """``antilog[k]`` is a^k for k = 0 .. L-2."""
        v = [0] * self.params.s
        v[0] = 1
        out = []
        for _ in range(self.L - 1):
            out.append(FieldElement(tuple(v), self.p))
            v = _mul_by_root(v, self.params)
        return out

    @cached_property
    def log(self) -> dict[FieldElement, int]:
        return {a: k for k, a in enumerate(self.antilog)}

    @cached_property
    def phasors(self) -> np.ndarray:
        """Complex e^{i lambda_k} table, shape (L, L), rows indexed like ``symbols``."""
        return _root_of_unity_table(self.p)[self.symbols]

    @cached_property
    def sum_index(self) -> np.ndarray:
        """``sum_index[a, b]`` is the index of label(a) + label(b)."""
        p, s = self.params.p, self.params.s
        coeffs = np.array([lab.coeffs for lab in self.labels], dtype=np.int64)
        summed = (coeffs[:, None, :] + coeffs[None, :, :]) % p
        weights = p ** np.arange(s, dtype=np.int64)
        return summed @ weights

    def check_label(self, label: FieldElement) -> FieldElement:
        if label.p != self.p or len(label.coeffs) != self.params.s:
            raise KeyError(f"{label!r} is not a label of this GF({self.p}^{self.params.s}) set")
        return label

    def sequence(self, label: FieldElement) -> PhaseSequence:
        self.check_label(label)
        return PhaseSequence(self.symbols[label.index()], label)

    @property
    def sequences(self) -> dict[FieldElement, PhaseSequence]:
        return {lab: self.sequence(lab) for lab in self.labels}

    def phasor(self, label: FieldElement) -> np.ndarray:
        return self.phasors[self.check_label(label).index()]

    def nonzero_labels(self) -> list[FieldElement]:
        """Nonzero labels in antilog order a^0, a^1, ..."""
        return list(self.antilog)

    def is_compatible(self, other: "PpsSet") -> bool:
        return self is other or (self.params == other.params
                                 and np.array_equal(self.symbols, other.symbols))


def build_pps_set(params: PpsParams) -> PpsSet:
    """All-zero sequence plus every cyclic shift of the m-sequence, one zero appended.

    Shift k carries label a^k, so adding labels adds symbol sequences mod p.
    """
    base = generate_m_sequence(params)
    period = params.L - 1
    table = np.zeros((params.L, params.L), dtype=np.int64)
    v = [0] * params.s
    v[0] = 1
    for k in range(period):
        idx = FieldElement(tuple(v), params.p).index()
        table[idx, :period] = np.roll(base, -k)
        v = _mul_by_root(v, params)
    return PpsSet(params, table)


def sequence_product(pps: PpsSet, a: FieldElement, b: FieldElement) -> FieldElement:
    """Label of the element-wise product of the phase sequences labelled ``a`` and ``b``."""
    pps.check_label(a)
    pps.check_label(b)
    return a + b


def normalized_correlation(x: PhaseSequence, y: PhaseSequence) -> complex:
    if len(x) != len(y):
        raise ValueError(f"sequence lengths differ: {len(x)} vs {len(y)}")
    return complex(np.mean(np.exp(1j * (x.phases - y.phases))))


@dataclass(frozen=True)
class VerificationReport:
    closure_ok: bool
    balance_max_dev: float
    orthogonality_max_dev: float
    primitive_ok: bool
    census_ok: bool = True

    def passed(self, tol: float = DEFAULT_TOL, L: int = 1) -> bool:
        return (self.closure_ok and self.primitive_ok and self.census_ok
                and self.balance_max_dev <= tol * L
                and self.orthogonality_max_dev <= tol)

    def as_dict(self) -> dict:
        return {
            "closure_ok": self.closure_ok,
            "balance_max_dev": self.balance_max_dev,
            "orthogonality_max_dev": self.orthogonality_max_dev,
            "primitive_ok": self.primitive_ok,
            "census_ok": self.census_ok,
        }


def gram_matrix(pps: PpsSet) -> np.ndarray:
    phi = pps.phasors
    return phi @ phi.conj().T / pps.L


def verify_properties(pps: PpsSet) -> VerificationReport:
    """Check closure (exactly), balance and orthogonality of a sequence set."""
    p, L = pps.p, pps.L
    sym = pps.symbols
    closure_ok = _accel.closure_violations(sym, pps.sum_index, p) == 0

    zero_idx = pps.zero.index()
    nonzero = np.array([i for i in range(L) if i != zero_idx])
    sums = pps.phasors[nonzero].sum(axis=1)
    balance = float(np.max(np.abs(sums))) if len(nonzero) else 0.0

    ortho = float(np.max(np.abs(gram_matrix(pps) - np.eye(L))))

    per = L // p
    census_ok = not np.any(sym[zero_idx]) and all(
        np.array_equal(np.bincount(sym[i], minlength=p), np.full(p, per)) for i in nonzero)

    return VerificationReport(
        closure_ok=bool(closure_ok),
        balance_max_dev=balance,
        orthogonality_max_dev=ortho,
        primitive_ok=verify_primitive(pps.params),
        census_ok=bool(census_ok),
    )
