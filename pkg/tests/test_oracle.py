import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viag.errors import RankDeficientError, SingularParametersError
from viag.oracle import (
    DensityMatrix3,
    chi_from_rho_ca,
    default_grid,
    ground_state,
    lindblad_steady_state,
    liouvillian,
    steady_rho_ca_linear,
    validate_chi,
)
from viag.physics import AtomicMedium, susceptibility

from .conftest import GAMMA_CA, KAPPA

OP = 1e-3 * GAMMA_CA


def medium_with(**kw):
    base = dict(dipole_moment=3.79e-29, density=1e18, gamma_ca_decay=GAMMA_CA, dephase_b=KAPPA)
    base.update(kw)
    return AtomicMedium(**base)


# -- linear response


def test_linear_two_level_limit():
    m = medium_with()
    for dp in (0.0, 0.7 * GAMMA_CA, -2 * GAMMA_CA):
        rho = steady_rho_ca_linear(m, OP, 0.0, dp, 0.0)
        assert rho == pytest.approx(1j * OP / (m.gamma_ca + 2j * dp), rel=1e-14)


def test_linear_resonance_hand_solution():
    # at Dp = delta = 0: rho_ca = i Op gba / (Oc^2 + gba gca)
    m = medium_with()
    oc = 0.8 * GAMMA_CA
    rho = steady_rho_ca_linear(m, OP, oc, 0.0, 0.0)
    expected = 1j * OP * m.gamma_ba / (oc**2 + m.gamma_ba * m.gamma_ca)
    assert rho == pytest.approx(expected, rel=1e-14)


@settings(max_examples=50)
@given(
    oc=st.floats(0, 5),
    dp=st.floats(-5, 5),
    dc=st.floats(-5, 5),
    op=st.floats(1e-6, 10),
)
def test_linear_response_is_linear_in_probe(oc, dp, dc, op):
    m = medium_with()
    g = GAMMA_CA
    a = steady_rho_ca_linear(m, op * g, oc * g, dp * g, dc * g) / (op * g)
    b = steady_rho_ca_linear(m, g, oc * g, dp * g, dc * g) / g
    assert abs(a - b) <= 1e-14 * abs(b)


def test_linear_singular_system():
    m = AtomicMedium(3.79e-29, 1e18, GAMMA_CA)  # gamma_ba = 0
    with pytest.raises(SingularParametersError):
        steady_rho_ca_linear(m, OP, 0.0, 0.0, 0.0)


@settings(max_examples=100)
@given(oc=st.floats(0, 5), dp=st.floats(-5, 5), dc=st.floats(-5, 5))
def test_linear_matches_closed_form(oc, dp, dc):
    m = medium_with(gamma_cb_decay=0.2 * GAMMA_CA, dephase_c=0.1 * GAMMA_CA)
    g = GAMMA_CA
    lin = chi_from_rho_ca(m, steady_rho_ca_linear(m, OP, oc * g, dp * g, dc * g), OP)
    closed = susceptibility(m, oc * g, dp * g, dc * g).value
    assert abs(lin - closed) <= 1e-10 * abs(closed)


# -- Lindblad


def test_liouvillian_preserves_trace():
    lv = liouvillian(medium_with(gamma_cb_decay=1e6, dephase_c=2e6), OP, 1e7, 3e6, -1e6, GAMMA_CA)
    trace_row = np.zeros(9)
    trace_row[:3] = 1.0
    assert np.max(np.abs(trace_row @ lv)) < 1e-14


def test_dark_fields_decay_to_ground_state():
    m = medium_with()
    with pytest.raises(RankDeficientError) as info:
        lindblad_steady_state(m, 0.0, 0.0, 0.0, 0.0)
    assert info.value.null_dim >= 2
    rho = lindblad_steady_state(m, 0.0, 0.0, 0.0, 0.0, initial=ground_state())
    assert np.allclose(rho.matrix, ground_state(), atol=1e-14)


def test_steady_state_is_unique_with_both_fields():
    from viag.oracle import _null_space_dim

    m = medium_with()
    for oc in (0.05, 0.3, 2.0):
        lv = liouvillian(m, OP, oc * GAMMA_CA, 0.1 * GAMMA_CA, 0.0, GAMMA_CA)
        assert _null_space_dim(lv) == 1


@pytest.mark.parametrize(
    "extra",
    [{}, {"gamma_cb_decay": 0.3 * GAMMA_CA}, {"dephase_c": 0.2 * GAMMA_CA, "gamma_cb_decay": 0.1 * GAMMA_CA}],
)
def test_weak_probe_converges_quadratically(extra):
    # channel rates chosen so coherences relax at gamma_ca/2, gamma_ba/2;
    # any other normalisation would show up here as an O(1) mismatch
    m = medium_with(**extra)
    oc, dp = 0.4 * GAMMA_CA, 0.15 * GAMMA_CA
    closed = susceptibility(m, oc, dp, 0.0).value
    errs = []
    for op in (1e-2, 1e-3, 1e-4):
        rho = lindblad_steady_state(m, op * GAMMA_CA, oc, dp, 0.0)
        errs.append(abs(chi_from_rho_ca(m, rho.rho_ca, op * GAMMA_CA) - closed) / abs(closed))
    assert errs[1] < 1e-4
    for coarse, fine in zip(errs, errs[1:]):
        assert 50 <= coarse / fine <= 200


@settings(max_examples=100, deadline=None)
@given(
    gca=st.floats(0.1, 10),
    gcb=st.floats(0, 5),
    gb=st.floats(0.001, 5),
    gc=st.floats(0, 5),
    op=st.floats(1e-3, 3),
    oc=st.floats(1e-2, 5),
    dp=st.floats(-5, 5),
    dc=st.floats(-5, 5),
)
def test_density_matrix_invariants(gca, gcb, gb, gc, op, oc, dp, dc):
    m = AtomicMedium(1e-29, 1e18, gca, gamma_cb_decay=gcb, dephase_b=gb, dephase_c=gc)
    rho = lindblad_steady_state(m, op, oc, dp, dc)
    rho.check()


def test_density_matrix_check_catches_violations():
    bad = ground_state() * 2
    with pytest.raises(ValueError):
        DensityMatrix3(bad).check()
    nonherm = ground_state()
    nonherm[0, 1] = 0.1
    with pytest.raises(ValueError):
        DensityMatrix3(nonherm).check()


# -- validation report


def test_validate_default_grid(cfg):
    pts = default_grid(cfg.gamma_ca_decay, cfg.period)
    assert len(pts) == 5 * 21 * 9
    report = validate_chi(pts, cfg.medium(), cfg.coupling_g, cfg.period)
    assert report.max_dev_linear < 1e-10
    assert report.max_dev_lindblad < 1e-4
    lo, hi = report.richardson_range
    assert 50 <= lo and hi <= 200
    assert report.ok and not report.failing


def test_validate_two_level_points(cfg):
    pts = [(n, dp * cfg.gamma_ca_decay, 0.0) for n in (0, 3) for dp in (-1.0, 0.0, 0.5)]
    report = validate_chi(pts, cfg.medium(), cfg.coupling_g, cfg.period)
    m = cfg.medium()
    for r in report.records:
        lorentz = 2 * m.chi_prefactor * 1j / (m.gamma_ca + 2j * r.detuning_p)
        assert r.omega_c == 0.0
        for v in (r.chi_closed, r.chi_linear, r.chi_extrapolated):
            assert v == pytest.approx(lorentz, rel=1e-9)
        assert r.dev_lindblad < 1e-4
    assert report.ok


def test_validate_empty_grid(cfg):
    with pytest.raises(ValueError):
        validate_chi([], cfg.medium(), cfg.coupling_g, cfg.period)


def test_validate_flags_instead_of_raising(cfg):
    # an absurdly strong "weak" probe breaks linear response; that is reported
    pts = [(0, 0.0, cfg.period / 2)]
    report = validate_chi(pts, cfg.medium(), cfg.coupling_g, cfg.period, omega_p=cfg.gamma_ca_decay)
    assert not report.ok
    assert report.failing[0].dev_lindblad > 1e-4


def test_report_is_json_lines(cfg):
    pts = [(0, 0.0, cfg.period / 3), (1, 0.2 * cfg.gamma_ca_decay, cfg.period / 2)]
    report = validate_chi(pts, cfg.medium(), cfg.coupling_g, cfg.period)
    lines = report.to_jsonl().splitlines()
    records = [json.loads(line) for line in lines]
    assert [r["record"] for r in records] == ["point", "point", "summary"]
    assert records[-1]["points"] == 2
    assert len(records[0]["chi_closed"]) == 2
    assert math.isclose(records[-1]["max_dev_linear"], report.max_dev_linear)
