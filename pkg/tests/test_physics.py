import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viag.errors import DomainError, SingularParametersError
from viag.physics import (
    AtomicMedium,
    CavityConfig,
    ProbeConfig,
    derive_coupling,
    rabi_amplitude,
    rabi_at,
    susceptibility,
    susceptibility_appendix,
)

from .conftest import GAMMA_CA, KAPPA

rates = st.floats(1e3, 1e8)
detunings = st.floats(-1e8, 1e8)


def make_medium(gamma_ca=GAMMA_CA, gamma_ba=KAPPA, **kw):
    return AtomicMedium(3.79e-29, 1e18, gamma_ca, dephase_b=gamma_ba, **kw)


# -- coupling / Rabi frequencies


@pytest.mark.parametrize("beta,gca,kappa,g", [(1.0, 4.0, 1.0, 1.0), (4.0, 1.0, 1.0, 1.0)])
def test_derive_coupling_trivial(beta, gca, kappa, g):
    assert derive_coupling(beta, gca, kappa) == pytest.approx(g, rel=1e-15)


def test_derive_coupling_reference_set():
    # sqrt(3.2 * 5.2e6 * 173e3) / 2 evaluated separately: 848339.5546595715 Hz
    g = derive_coupling(3.2, GAMMA_CA, KAPPA)
    assert g / (2 * math.pi) == pytest.approx(848339.5546595715, rel=1e-12)
    assert g / (2 * math.pi) == pytest.approx(8.48e5, rel=1e-3)


@pytest.mark.parametrize("bad", ["beta", "gamma_ca_decay", "kappa"])
def test_derive_coupling_names_bad_parameter(bad):
    args = {"beta": 3.2, "gamma_ca_decay": GAMMA_CA, "kappa": KAPPA}
    args[bad] = 0.0
    with pytest.raises(DomainError) as info:
        derive_coupling(**args)
    assert info.value.param == bad


@given(beta=st.floats(1e-3, 1e3), gca=rates, kappa=rates)
def test_cooperativity_round_trip(beta, gca, kappa):
    cav = CavityConfig.from_cooperativity(beta, gca, kappa, 0, 1e-6)
    assert cav.cooperativity(gca) == pytest.approx(beta, rel=1e-12)


@pytest.mark.parametrize("g,n,expected", [(1.0, 0, 2.0), (1.0, 3, 4.0), (2.5, 8, 15.0)])
def test_rabi_amplitude(g, n, expected):
    assert rabi_amplitude(g, n) == expected


def test_rabi_amplitude_rejects_bad_photon_numbers():
    with pytest.raises(DomainError):
        rabi_amplitude(1.0, -1)
    with pytest.raises(DomainError):
        rabi_amplitude(1.0, 0.5)  # mean photon numbers are not Fock states
    with pytest.raises(DomainError):
        CavityConfig(1.0, 1.0, 1.5, 1.0)


def test_rabi_amplitude_increasing():
    vals = [rabi_amplitude(1.3, n) for n in range(30)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_rabi_at():
    assert rabi_at(0.0, 5.0, 2.0) == 0.0
    assert rabi_at(1.0, 7.0, 2.0) == 7.0
    assert rabi_at(0.5, 2.0, 2.0) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert abs(rabi_at(2.0, 7.0, 2.0)) < 1e-14


def test_probe_derived_quantities():
    p = ProbeConfig(852e-9, 3.0, 1.0)
    assert p.delta == 2.0
    assert p.k_p == pytest.approx(2 * math.pi / 852e-9)


def test_medium_derived_rates():
    m = AtomicMedium(1e-29, 1e18, 5.0, gamma_cb_decay=2.0, dephase_b=0.3, dephase_c=1.0)
    assert m.gamma_ca == 8.0
    assert m.gamma_ba == 0.3
    with pytest.raises(DomainError):
        AtomicMedium(1e-29, 1e18, 0.0)
    with pytest.raises(DomainError):
        AtomicMedium(1e-29, -1.0, 1.0)


# -- susceptibility


def test_node_is_pure_two_level_absorption():
    m = make_medium()
    chi = susceptibility(m, 0.0, 0.0, 0.0)
    assert chi.value == pytest.approx(2j * m.n0, rel=1e-15)


def test_reference_n0_matches_scalar_evaluation(medium):
    # |mu|^2 N / (hbar eps0 Gamma_ca) with hbar = 1.054571817e-34
    assert medium.n0 == pytest.approx(0.047105951048849314, rel=1e-9)


def test_transparency_dip_at_antinode(medium, cavity):
    chi_antinode = susceptibility(medium, cavity.omega0, 0.0, 0.0)
    chi_node = susceptibility(medium, 0.0, 0.0, 0.0)
    # one-line closed form at resonance: 2 N0 gba gca / (Oc^2 + gba gca)
    gca, gba, oc = medium.gamma_ca, medium.gamma_ba, cavity.omega0
    assert chi_antinode.imag == pytest.approx(2 * medium.n0 * gba * gca / (oc**2 + gba * gca), rel=1e-13)
    assert chi_antinode.imag == pytest.approx(0.022431405261356813, rel=1e-9)
    assert chi_antinode.imag < chi_node.imag


@given(oc=st.floats(0, 1e8), gca=rates, gba=rates)
def test_resonant_dispersion_vanishes(oc, gca, gba):
    chi = susceptibility(make_medium(gca, gba), oc, 0.0, 0.0)
    assert chi.real == 0.0


@given(oc=st.floats(0, 1e8), dp=detunings, dc=detunings, gca=rates, gba=rates)
def test_passivity(oc, dp, dc, gca, gba):
    assert susceptibility(make_medium(gca, gba), oc, dp, dc).imag >= 0.0


@given(oc=st.floats(0, 1e8), dp=detunings, gca=rates, gba=rates)
def test_detuning_parity(oc, dp, gca, gba):
    m = make_medium(gca, gba)
    plus = susceptibility(m, oc, dp, 0.0)
    minus = susceptibility(m, oc, -dp, 0.0)
    scale = abs(plus.value) + 1e-300
    assert abs(plus.real + minus.real) <= 1e-13 * scale
    assert abs(plus.imag - minus.imag) <= 1e-13 * scale


def test_normalised_form_equals_appendix_form_on_grid():
    m = make_medium(GAMMA_CA, KAPPA, gamma_cb_decay=0.1 * GAMMA_CA, dephase_c=0.05 * GAMMA_CA)
    oc = np.linspace(0, 3, 10) * GAMMA_CA
    dp = np.linspace(-3, 3, 10) * GAMMA_CA
    delta = np.linspace(-0.5, 0.5, 10) * GAMMA_CA
    O, D, E = np.meshgrid(oc, dp, delta, indexing="ij")
    a = susceptibility(m, O, D, D - E).value
    b = susceptibility_appendix(m, O, D, D - E).value
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-12


def test_vit_dip_deepens_with_photon_number(medium, cfg):
    ims = []
    for n in range(21):
        cav = cfg.with_overrides(photon_number=n).cavity()
        ims.append(susceptibility(medium, cav.rabi_at(cav.spatial_period / 2), 0.0, 0.0).imag)
    assert all(b < a for a, b in zip(ims, ims[1:]))


def test_singular_denominator_rejected():
    m = AtomicMedium(3.79e-29, 1e18, GAMMA_CA)  # gamma_ba = 0
    with pytest.raises(SingularParametersError):
        susceptibility(m, 0.0, 1e6, 1e6)
    with pytest.raises(SingularParametersError):
        susceptibility_appendix(m, 0.0, 0.0, 0.0)
    # not singular as soon as either the control or the two-photon detuning is on
    assert np.isfinite(susceptibility(m, 1e6, 0.0, 0.0).value)


def test_array_broadcasting(medium):
    dps = np.linspace(-1, 1, 7) * GAMMA_CA
    chi = susceptibility(medium, 1e6, dps, 0.0)
    assert chi.value.shape == (7,)
    for dp, v in zip(dps, chi.value):
        assert susceptibility(medium, 1e6, dp, 0.0).value == pytest.approx(v, rel=1e-15)


@settings(max_examples=50)
@given(oc=st.floats(0, 1e8), dp=detunings, dc=detunings)
def test_scaled_accessor(oc, dp, dc):
    m = make_medium()
    chi = susceptibility(m, oc, dp, dc)
    assert chi.scaled == pytest.approx(chi.value / m.n0)
