"""Lattice sets, dispersions and field configurations."""

import math

import numpy as np
import pytest

import bcslab as bl


def test_desk_set_sizes(desk_M, desk_Q):
    assert len(desk_M) == 300
    assert len(desk_Q) == 1485


def test_momentum_set_is_product(desk_M):
    # every (n0, m) combination of the frequency range and surviving spatial
    # vectors is present exactly once
    assert len(desk_M) == len(desk_M.freq_n0) * len(desk_M.spatial_m)
    assert len(set(desk_M.index)) == len(desk_M)


def test_energy_window(desk_spec, desk_M):
    assert np.all(np.abs(desk_M.e) <= desk_spec.energy_window + 1e-12)
    # a momentum outside the window is rejected
    for m in bl.model.spatial_grid(desk_spec):
        inside = abs(bl.dispersion(desk_spec, m)) <= desk_spec.energy_window
        assert (m in [p for p in desk_M.spatial_m]) == inside


def test_frequency_cutoff(desk_spec, desk_M):
    assert np.all(np.abs(desk_M.k0) <= desk_spec.nu)
    n_hi = int(desk_M.freq_n0.max())
    k_next = (math.pi / desk_spec.beta) * (2 * (n_hi + 1) + 1)
    assert k_next > desk_spec.nu


def test_dispersion_even(desk_spec):
    for m in bl.model.spatial_grid(desk_spec):
        neg = tuple(-mi for mi in m)
        assert bl.dispersion(desk_spec, m) == bl.dispersion(desk_spec, neg)


def test_quadratic_dispersion():
    spec = bl.ModelSpec(
        d=1, L=8.0, beta=2.0, nu=4.0, lam=0.0,
        dispersion=bl.DispersionSpec(kind="quadratic"),
        energy_window=5.0,
    )
    assert bl.dispersion(spec, (2,)) == pytest.approx(0.5 * (2 * math.pi * 2 / 8.0) ** 2)


def test_dispersion_kind_rejected():
    with pytest.raises(ValueError):
        bl.DispersionSpec(kind="linear")


def test_spec_validation():
    with pytest.raises(ValueError):
        bl.ModelSpec(d=4)
    with pytest.raises(ValueError):
        bl.ModelSpec(lam=-1.0)
    with pytest.raises(ValueError):
        bl.ModelSpec(beta=8.0, nu=0.1)


def test_momentum_negation():
    k = bl.Momentum(3, (2,))
    assert -k == bl.Momentum(-4, (-2,))
    q = bl.Momentum(3, (2,), "bosonic")
    assert -q == bl.Momentum(-3, (-2,), "bosonic")


def test_a_values(desk_spec, desk_M):
    for i, p in enumerate(desk_M.momenta):
        k0 = (math.pi / desk_spec.beta) * (2 * p.n0 + 1)
        assert desk_M.a[i] == pytest.approx(1j * k0 - bl.dispersion(desk_spec, p.m))


def test_transfer_negation_involution(desk_Q):
    assert np.all(desk_Q.neg_index[desk_Q.neg_index] == np.arange(len(desk_Q)))
    assert desk_Q.neg_index[desk_Q.zero_index] == desk_Q.zero_index


def test_diff_index(small_M, small_Q):
    for i, k in enumerate(small_M.momenta):
        for j, p in enumerate(small_M.momenta):
            q = small_Q.momenta[small_Q.diff_index[i, j]]
            assert q.n0 == k.n0 - p.n0
            assert q.m == tuple(a - b for a, b in zip(k.m, p.m))


def test_transfer_set_closure(desk_M, desk_Q):
    diffs = {(k.n0 - p.n0, tuple(np.subtract(k.m, p.m)))
             for k in desk_M.momenta for p in desk_M.momenta}
    assert diffs <= set(desk_Q.index)


def test_nondegeneracy(desk_spec, desk_Q):
    assert bl.nondegeneracy_check(desk_spec, desk_Q)


def test_bcs_config(desk_spec, desk_Q):
    theta = 0.7
    phi = bl.bcs_config(desk_spec, desk_Q, 0.25, theta)
    z0 = phi.values[desk_Q.zero_index]
    assert abs(z0) == pytest.approx(0.25 * math.sqrt(desk_spec.kappa))
    assert math.atan2(z0.imag, z0.real) == pytest.approx(theta)
    mask = np.ones(len(desk_Q), dtype=bool)
    mask[desk_Q.zero_index] = False
    assert np.all(phi.values[mask] == 0)
    assert bl.field_norm(phi) == pytest.approx(0.25**2)
    with pytest.raises(ValueError):
        bl.bcs_config(desk_spec, desk_Q, -0.1, 0.0)


def test_random_config_reproducible(desk_spec, desk_Q):
    a = bl.random_config(desk_spec, desk_Q, 1.0, seed=7)
    b = bl.random_config(desk_spec, desk_Q, 1.0, seed=7)
    c = bl.random_config(desk_spec, desk_Q, 1.0, seed=8)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_field_config_validation(desk_Q):
    with pytest.raises(ValueError):
        bl.FieldConfig(desk_Q, np.zeros(3))
    bad = np.zeros(len(desk_Q), dtype=complex)
    bad[0] = np.nan
    with pytest.raises(ValueError):
        bl.FieldConfig(desk_Q, bad)


def test_autocorrelation_brute(small_spec, small_Q):
    phi = bl.random_config(small_spec, small_Q, 1.0, seed=3)
    for q in small_Q.momenta:
        acc = 0.0 + 0.0j
        for i, p in enumerate(small_Q.momenta):
            key = (p.n0 + q.n0, tuple(a + b for a, b in zip(p.m, q.m)))
            j = small_Q.index.get(key)
            if j is not None:
                acc += phi.values[i] * np.conj(phi.values[j])
        assert bl.autocorrelation(phi, q) == pytest.approx(acc, abs=1e-12)


def test_autocorrelation_all_matches_pointwise(desk_spec, desk_Q):
    phi = bl.random_config(desk_spec, desk_Q, 1.0, seed=11)
    allvals = bl.autocorrelation_all(phi)
    rng = np.random.default_rng(0)
    for i in rng.choice(len(desk_Q), size=25, replace=False):
        q = desk_Q.momenta[int(i)]
        assert allvals[int(i)] == pytest.approx(
            bl.autocorrelation(phi, q), rel=1e-10, abs=1e-10
        )


def test_autocorrelation_zero_transfer(desk_spec, desk_Q):
    phi = bl.random_config(desk_spec, desk_Q, 1.0, seed=2)
    q0 = desk_Q.momenta[desk_Q.zero_index]
    assert bl.autocorrelation(phi, q0) == pytest.approx(
        float(np.sum(np.abs(phi.values) ** 2))
    )
