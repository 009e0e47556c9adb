import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jch import SiteParams, TruncationError
from jch.jc_core import (
    atomic_edge,
    atomic_limit_filling,
    dressed_energy,
    dressed_state,
    jc_block,
    rabi_chi,
)

detunings = st.floats(-1e3, 1e3, allow_nan=False)
fillings = st.integers(1, 40)


@given(fillings, detunings, st.sampled_from(["lower", "upper"]))
def test_dressed_state_is_normalised_eigenvector(n, delta, branch):
    site = SiteParams.from_detuning(delta, beta=1.0, omega=0.3)
    ds = dressed_state(n, branch, site)
    vec = np.array([ds.c_g, ds.c_e])
    assert math.isclose(vec @ vec, 1.0, rel_tol=1e-14)
    block = jc_block(n, site)
    resid = np.linalg.norm(block @ vec - ds.energy * vec)
    assert resid <= 1e-10 * max(1.0, np.abs(block).max())


@given(fillings, detunings)
def test_block_eigenvalues_match_branch_energies(n, delta):
    site = SiteParams.from_detuning(delta, omega=-0.7)
    w = np.linalg.eigvalsh(jc_block(n, site))
    expected = [dressed_energy(n, site, "lower"), dressed_energy(n, site, "upper")]
    assert np.allclose(w, expected, rtol=1e-12, atol=1e-12 * max(1.0, abs(delta)))


def test_lower_amplitudes_survive_large_detuning():
    # delta >> beta: the lower branch is atom-like with photon weight beta/delta
    ds = dressed_state(1, "lower", SiteParams.from_detuning(1e8))
    assert math.isclose(ds.c_g, 1e-8, rel_tol=1e-12) and math.isclose(ds.c_e, -1.0)
    # delta << -beta: photon-like, atomic weight beta/|delta|
    ds = dressed_state(1, "lower", SiteParams.from_detuning(-1e8))
    assert math.isclose(ds.c_e, -1e-8, rel_tol=1e-12) and math.isclose(ds.c_g, 1.0)


def test_empty_cavity_is_zero_energy_ground(tuned):
    assert dressed_energy(0, tuned) == 0.0
    ds = dressed_state(0, "upper", tuned)
    assert (ds.c_g, ds.c_e, ds.branch) == (1.0, 0.0, "lower")
    with pytest.raises(ValueError):
        jc_block(0, tuned)


def test_rabi_frequency_values(tuned, detuned):
    assert rabi_chi(4, tuned) == 2.0
    assert math.isclose(rabi_chi(1, detuned), math.sqrt(1.25))


def test_edges_of_resonant_lobes(tuned):
    # at resonance E(n) = n omega - sqrt(n) beta
    assert math.isclose(atomic_edge(0, tuned), -1.0)
    assert math.isclose(atomic_edge(1, tuned), 1 - math.sqrt(2))
    assert math.isclose(atomic_edge(2, tuned), math.sqrt(2) - math.sqrt(3))


@given(st.floats(-5, 5), st.floats(-2.0, -0.15))
def test_filling_minimises_grand_energy(delta, mu_minus_omega):
    site = SiteParams.from_detuning(delta, omega=0.0)
    n = atomic_limit_filling(site, mu_minus_omega, n_max=60)
    grand = [dressed_energy(m, site) - mu_minus_omega * m for m in range(61)]
    assert grand[n] <= min(grand) + 1e-12


def test_filling_tie_goes_to_smaller_n(tuned):
    mu = atomic_edge(1, tuned)
    assert atomic_limit_filling(tuned, mu) == 1


def test_filling_at_cutoff_raises(tuned):
    with pytest.raises(TruncationError):
        atomic_limit_filling(tuned, 0.5, n_max=10)


@given(st.floats(-3, 3), st.floats(-50, 50), st.floats(-1.5, -0.2))
def test_filling_is_gauge_invariant(delta, c, mu_minus_omega):
    site = SiteParams.from_detuning(delta, omega=0.4)
    mu = 0.4 + mu_minus_omega
    assert atomic_limit_filling(site, mu, 60) == atomic_limit_filling(site.shifted(c), mu + c, 60)


def test_site_validation():
    with pytest.raises(ValueError):
        SiteParams(0.0, 0.0, beta=0.0)
    with pytest.raises(ValueError):
        SiteParams(math.nan, 0.0)
    with pytest.raises(ValueError):
        rabi_chi(-1, SiteParams(0.0, 0.0))
