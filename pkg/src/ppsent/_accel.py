"""Kernel dispatch: numba-compiled loops with a pure-numpy fallback.

Set ``PPSENT_NO_NUMBA=1`` to force the numpy path (also used automatically
when numba cannot be imported). Both paths sum slots in ascending order so
results agree to float reassociation of the inner products only.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("PPSENT_NO_NUMBA", "") not in ("1", "true", "yes")


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# LFSR
# ---------------------------------------------------------------------------

def _lfsr_run_py(taps, p, seed, nsteps):
    s = taps.shape[0]
    state = seed.copy()
    out = np.empty(nsteps, dtype=np.int64)
    for t in range(nsteps):
        out[t] = state[0]
        acc = 0
        for i in range(s):
            acc += taps[i] * state[i]
        nxt = (-acc) % p
        for i in range(s - 1):
            state[i] = state[i + 1]
        state[s - 1] = nxt
    return out


def _lfsr_period_py(taps, p, seed, max_steps):
    """Steps until the register first returns to ``seed``; -1 if it never does."""
    s = taps.shape[0]
    state = seed.copy()
    for t in range(1, max_steps + 1):
        acc = 0
        for i in range(s):
            acc += taps[i] * state[i]
        nxt = (-acc) % p
        for i in range(s - 1):
            state[i] = state[i + 1]
        state[s - 1] = nxt
        same = True
        for i in range(s):
            if state[i] != seed[i]:
                same = False
                break
        if same:
            return t
    return -1


# ---------------------------------------------------------------------------
# Closure check over all label pairs
# ---------------------------------------------------------------------------

def _closure_violations_np(symbols, sum_index, p):
    lhs = (symbols[:, None, :] + symbols[None, :, :]) % p
    rhs = symbols[sum_index]
    return int(np.count_nonzero(np.any(lhs != rhs, axis=2)))


def _closure_violations_loop(symbols, sum_index, p):
    n, length = symbols.shape
    bad = 0
    for a in range(n):
        for b in range(n):
            c = sum_index[a, b]
            for k in range(length):
                if (symbols[a, k] + symbols[b, k]) % p != symbols[c, k]:
                    bad += 1
                    break
    return bad


# ---------------------------------------------------------------------------
# Slot-averaged product of single-field expectations
# ---------------------------------------------------------------------------

_CHUNK = 4096

def _slot_products_np(re_cross, im_cross, angles):
    """Average over slots of prod_j 2 Re(cross_jk e^{i theta_j}).

    ``re_cross``/``im_cross`` have shape (F, L): per-field, per-slot value of
    conj(a_k) b_k. ``angles`` has shape (M, F). Returns shape (M,).
    """
    out = np.empty(angles.shape[0])
    for start in range(0, angles.shape[0], _CHUNK):
        block = angles[start:start + _CHUNK]
        c = np.cos(block)[:, :, None]
        s = np.sin(block)[:, :, None]
        per_field = 2.0 * (re_cross[None] * c - im_cross[None] * s)
        prod = np.prod(per_field, axis=1)
        out[start:start + _CHUNK] = np.sum(prod, axis=1) / re_cross.shape[1]
    return out


def _slot_products_loop(re_cross, im_cross, angles):
    m, f = angles.shape
    length = re_cross.shape[1]
    out = np.empty(m)
    for i in range(m):
        cs = np.empty(f)
        sn = np.empty(f)
        for j in range(f):
            cs[j] = np.cos(angles[i, j])
            sn[j] = np.sin(angles[i, j])
        total = 0.0
        for k in range(length):
            prod = 1.0
            for j in range(f):
                prod *= 2.0 * (re_cross[j, k] * cs[j] - im_cross[j, k] * sn[j])
            total += prod
        out[i] = total / length
    return out


# ---------------------------------------------------------------------------
# Ensemble-averaged outer product
# ---------------------------------------------------------------------------

def _mean_outer_np(vectors):
    acc = np.zeros((vectors.shape[1], vectors.shape[1]), dtype=np.complex128)
    for k in range(vectors.shape[0]):
        v = vectors[k]
        acc += np.outer(v, v.conj())
    return acc / vectors.shape[0]


def _mean_outer_loop(vectors):
    length, dim = vectors.shape
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(length):
        for i in range(dim):
            vi = vectors[k, i]
            for j in range(dim):
                acc[i, j] += vi * np.conj(vectors[k, j])
    return acc / length


if USE_NUMBA:
    _jit = numba.njit(cache=True)
    lfsr_run = _jit(_lfsr_run_py)
    lfsr_period = _jit(_lfsr_period_py)
    closure_violations = _jit(_closure_violations_loop)
    slot_products = _jit(_slot_products_loop)
    mean_outer = _jit(_mean_outer_loop)
else:
    lfsr_run = _lfsr_run_py
    lfsr_period = _lfsr_period_py
    closure_violations = _closure_violations_np
    slot_products = _slot_products_np
    mean_outer = _mean_outer_np

# reference implementations, always uncompiled (tests and benchmark compare against these)
numpy_kernels = {
    "lfsr_run": _lfsr_run_py,
    "lfsr_period": _lfsr_period_py,
    "closure_violations": _closure_violations_np,
    "slot_products": _slot_products_np,
    "mean_outer": _mean_outer_np,
}
