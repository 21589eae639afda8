import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ppsent.states import (HADAMARD, IDENTITY, NOT, IncompatibleSetError, NormalizationError,
                           UnitaryGate, UnsupportedFormError, apply_slot_gate, apply_unitary,
                           general_field_state, inner_product, inner_product_analytic,
                           instantiate_slot, make_field_state, mode_exchange, relative_labels,
                           tensor_product)

from oracles import dense_slot_state

S2 = 1 / math.sqrt(2)


def _random_field(rng, pps, max_terms=2):
    """Random normalized field, possibly several distinct labels per mode."""
    modes = []
    amps = []
    for _ in range(2):
        n = int(rng.integers(1, max_terms + 1))
        idx = rng.choice(pps.L, size=n, replace=False)
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        amps.append(a)
        modes.append([pps.labels[i] for i in idx])
    norm = math.sqrt(sum(np.sum(np.abs(a) ** 2) for a in amps))
    return general_field_state(list(zip(amps[0] / norm, modes[0])),
                               list(zip(amps[1] / norm, modes[1])), pps)


def test_make_field_state_examples(gf9):
    beta = gf9.antilog[2]
    f = make_field_state(1, 0, beta, gf9)
    assert f.modes == (((1, beta),), ((0, beta),))
    f = make_field_state(S2, S2, beta, gf9)
    assert inner_product(f, f) == pytest.approx(1)
    f = make_field_state(0.6, 0.8, gf9.zero, gf9)
    assert inner_product(f, f) == pytest.approx(1)


def test_make_field_state_rejects_unnormalized(gf9):
    with pytest.raises(NormalizationError):
        make_field_state(1, 1, gf9.zero, gf9)


def test_inner_product_examples(gf27):
    a, b = gf27.antilog[0], gf27.antilog[7]
    x = make_field_state(0.6, 0.8j, a, gf27)
    assert inner_product(x, x) == pytest.approx(1, abs=1e-12)
    assert abs(inner_product(x, make_field_state(0.6, 0.8j, b, gf27))) <= 1e-9
    assert abs(inner_product(make_field_state(1, 0, a, gf27), make_field_state(0, 1, a, gf27))) == 0


def test_inner_product_incompatible_sets(gf8, gf9):
    with pytest.raises(IncompatibleSetError):
        inner_product(make_field_state(1, 0, gf8.zero, gf8), make_field_state(1, 0, gf9.zero, gf9))


@pytest.mark.parametrize("ps", [(2, 3), (3, 2), (5, 2)])
def test_gram_identity(ps, pps_cache):
    pps = pps_cache(*ps)
    basis = [make_field_state(0.6, 0.8, lab, pps) for lab in pps.labels]
    gram = np.array([[inner_product(x, y) for y in basis] for x in basis])
    assert np.max(np.abs(gram - np.eye(pps.L))) <= 1e-9


@pytest.mark.parametrize("ps", [(2, 3), (3, 2)])
def test_inner_product_analytic_matches_slot_average(ps, pps_cache):
    pps = pps_cache(*ps)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x, y = _random_field(rng, pps, 3), _random_field(rng, pps, 3)
        assert abs(inner_product(x, y) - inner_product_analytic(x, y)) <= 1e-9


def test_tensor_product_bell_expansion(gf27):
    la, lb = gf27.antilog[1], gf27.antilog[4]
    fa, fb = mode_exchange([make_field_state(S2, S2, la, gf27), make_field_state(S2, S2, lb, gf27)])
    g = tensor_product([fa, fb])
    # e^{i(la+lb)}/2 [|00> + |11> + e^{i(lb-la)}|10> + e^{i(la-lb)}|01>]
    assert g.global_label == la + lb
    expected = {((0, 0), gf27.zero): 0.5, ((1, 1), gf27.zero): 0.5,
                ((1, 0), lb - la): 0.5, ((0, 1), la - lb): 0.5}
    assert set(g.coefficients) == set(expected)
    for key, val in expected.items():
        assert g.coefficients[key] == pytest.approx(val)
    assert g.partition_counts() == (2, 2)


def test_tensor_product_single_field_and_ground(gf9):
    f = make_field_state(0.6, 0.8, gf9.antilog[3], gf9)
    g = tensor_product([f])
    assert len(g.coefficients) == 2
    assert np.allclose(g.slot_vectors(), f.slot_vectors(), atol=1e-15)
    ground = tensor_product([make_field_state(1, 0, lab, gf9) for lab in gf9.antilog[:4]])
    assert [bits for bits, _ in ground.coefficients] == [(0, 0, 0, 0)]


@settings(max_examples=40, deadline=None)
@given(ps=st.sampled_from([(2, 3), (3, 2)]), n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_tensor_product_matches_kron_oracle(ps, n, seed, pps_cache):
    pps = pps_cache(*ps)
    rng = np.random.default_rng(seed)
    fields = [_random_field(rng, pps) for _ in range(n)]
    g = tensor_product(fields)
    labels = {lab for _, lab in g.coefficients}
    assert labels <= set(pps.labels)
    vecs = g.slot_vectors()
    for k in range(pps.L):
        assert np.allclose(vecs[k], dense_slot_state(fields, k), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(ps=st.sampled_from([(2, 3), (3, 2)]), n=st.integers(1, 5), seed=st.integers(0, 2**32 - 1))
def test_product_of_single_label_fields_is_normalized(ps, n, seed, pps_cache):
    # with several labels per mode, sums of labels can collide across fields and the
    # ensemble norm of the product drifts from 1; single-label fields never collide
    pps = pps_cache(*ps)
    rng = np.random.default_rng(seed)
    fields = [_random_field(rng, pps, max_terms=1) for _ in range(n)]
    g = tensor_product(fields)
    assert g.norm() == pytest.approx(1, abs=1e-9)
    assert all(np.linalg.norm(v) == pytest.approx(1, abs=1e-9) for v in g.slot_vectors())


def test_instantiate_slot_examples(gf9):
    f = make_field_state(0.6, 0.8, gf9.zero, gf9)
    for k in range(gf9.L):
        assert np.allclose(instantiate_slot(f, k), [0.6, 0.8])
    lab = gf9.antilog[1]
    f = make_field_state(0.6, 0.8j, lab, gf9)
    for k in range(gf9.L):
        ph = np.exp(2j * np.pi * gf9.symbols[lab.index(), k] / 3)
        assert np.allclose(instantiate_slot(f, k), [0.6 * ph, 0.8j * ph])
    with pytest.raises(IndexError):
        instantiate_slot(f, gf9.L)


def test_not_gate_on_field(gf9):
    lab = gf9.antilog[5]
    g = apply_unitary(tensor_product([make_field_state(0.6, 0.8, lab, gf9)]), 0, NOT)
    assert g.coefficients == {((1,), gf9.zero): 0.6, ((0,), gf9.zero): 0.8}
    assert g.global_label == lab


def test_identity_and_hadamard_squared(gf9):
    rng = np.random.default_rng(3)
    g = tensor_product([_random_field(rng, gf9) for _ in range(3)])
    same = apply_unitary(g, 1, IDENTITY)
    assert np.array_equal(same.slot_vectors(), g.slot_vectors())
    hh = apply_unitary(apply_unitary(g, 2, HADAMARD), 2, HADAMARD)
    assert np.max(np.abs(hh.slot_vectors() - g.slot_vectors())) <= 1e-12


def test_apply_unitary_errors(gf9):
    g = tensor_product([make_field_state(1, 0, gf9.zero, gf9)])
    with pytest.raises(IndexError):
        apply_unitary(g, 1, NOT)
    with pytest.raises(ValueError, match="unitary"):
        UnitaryGate(np.array([[1, 1], [0, 1]]))


def _random_unitary(rng):
    q, r = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return UnitaryGate(q * (np.diag(r) / np.abs(np.diag(r))))


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_slot_gate_commutation(n, seed, gf9):
    rng = np.random.default_rng(seed)
    g = tensor_product([_random_field(rng, gf9) for _ in range(n)])
    j = int(rng.integers(n))
    u = _random_unitary(rng)
    after = apply_unitary(g, j, u).slot_vectors()
    for k in range(gf9.L):
        assert np.max(np.abs(after[k] - apply_slot_gate(g.slot_vector(k), j, u))) <= 1e-12


def test_mode_exchange_examples(gf27):
    la, lb, lc = gf27.antilog[0], gf27.antilog[3], gf27.antilog[11]
    fa, fb, fc = (make_field_state(S2, S2, lab, gf27) for lab in (la, lb, lc))
    ga, gb = relative_labels(mode_exchange([fa, fb], [1, 0]))
    assert ga == lb - la and ga == -gb
    assert mode_exchange([fa, fb], [0, 1]) == [fa, fb]
    rels = relative_labels(mode_exchange([fa, fb, fc]))
    assert rels == [lb - la, lc - lb, la - lc]
    assert (rels[0] + rels[1] + rels[2]).is_zero()


def test_mode_exchange_involution(gf9):
    rng = np.random.default_rng(11)
    fa = make_field_state(0.6, 0.8, gf9.antilog[2], gf9)
    fb = make_field_state(0.6, -0.8j, gf9.antilog[6], gf9)
    twice = mode_exchange(mode_exchange([fa, fb], [1, 0]), [1, 0])
    assert twice == [fa, fb]
    assert twice[0].modes == fa.modes  # exact, amplitudes bit-identical
    del rng


def test_mode_exchange_rejects_multiterm(gf9):
    f = general_field_state([(0.6, gf9.zero), (0.0 + 0.6j, gf9.antilog[0])],
                            [(np.sqrt(0.28), gf9.antilog[1])], gf9)
    with pytest.raises(UnsupportedFormError):
        mode_exchange([f, make_field_state(1, 0, gf9.zero, gf9)])


@settings(max_examples=50, deadline=None)
@given(ps=st.sampled_from([(2, 3), (3, 2), (3, 3), (5, 2)]), data=st.data())
def test_cyclic_exchange_rps_sum_is_zero(ps, data, pps_cache):
    pps = pps_cache(*ps)
    n = data.draw(st.integers(2, 6))
    labels = data.draw(st.lists(st.sampled_from(pps.labels), min_size=n, max_size=n))
    perm = data.draw(st.permutations(range(n)))
    fields = [make_field_state(S2, S2, lab, pps) for lab in labels]
    total = pps.zero
    for r in relative_labels(mode_exchange(fields, perm)):
        total = total + r
    assert total.is_zero()
