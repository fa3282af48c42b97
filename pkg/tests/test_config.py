import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viag.config import parse_config, serialize_config
from viag.errors import ConfigError
from viag.experiments import ScenarioConfig, SweepAxis

TWO_PI = 2 * math.pi


def test_empty_text_gives_defaults():
    assert parse_config("") == ScenarioConfig()
    assert parse_config("# only a comment\n\n") == ScenarioConfig()


def test_units_and_aliases():
    cfg = parse_config(
        """
        lambda_p = 852 nm
        gamma_ca_decay = 5.2 MHz
        kappa: 173 kHz   # colon works too
        detuning_p = 0.25 Gca
        ell = 8 um
        n_c = 2
        n = 1e12 cm-3
        spatial_period = 4 lambda_p
        x = 0.25 period
        """
    )
    assert cfg.wavelength == 8.52e-07
    assert cfg.gamma_ca_decay == pytest.approx(TWO_PI * 5.2e6, rel=1e-15)
    assert cfg.kappa == pytest.approx(TWO_PI * 173e3, rel=1e-15)
    assert cfg.detuning_p == pytest.approx(0.25 * TWO_PI * 5.2e6, rel=1e-15)
    assert cfg.length == 8e-6
    assert cfg.photon_number == 2
    assert cfg.density == 1e18
    assert cfg.spatial_period == pytest.approx(4 * 852e-9)
    assert cfg.position == pytest.approx(852e-9)


def test_two_pi_switch():
    cfg = parse_config("2pi_times = false\nkappa = 1 MHz")
    assert cfg.kappa == 1e6
    assert parse_config("kappa = 1e6 rad/s").kappa == 1e6
    assert parse_config("kappa = 1e6").kappa == 1e6


def test_coupling_g_becomes_cooperativity():
    cfg = parse_config("g = 848339.5546595715 Hz")
    assert cfg.cooperativity == pytest.approx(3.2, rel=1e-12)
    with pytest.raises(ConfigError):
        parse_config("g = 1 MHz\nbeta = 2")


def test_overrides_win():
    cfg = parse_config("n_c = 2", ["n_c=7", "length = 5 um"])
    assert cfg.photon_number == 7 and cfg.length == 5e-6


def test_sweep_section():
    cfg = parse_config("sweep_param = n_c\nsweep_start = 0\nsweep_stop = 3\nsweep_points = 4")
    assert cfg.sweep == SweepAxis("photon_number", 0.0, 3.0, 4)
    with pytest.raises(ConfigError):
        parse_config("sweep_param = length\nsweep_start = 1 um")


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("kappa = 1 MHz\nbogus = 3", "bogus", 2),
        ("length = 3 Hz", "length", 1),
        ("kappa = -1 Hz", "kappa", 1),
        ("n_c = 1.5", "photon_number", 1),
        ("cooperativity = 3 m", "cooperativity", 1),
        ("length = abc", "length", 1),
        ("\n\nkappa = {a = 1}", "kappa", 3),
    ],
)
def test_errors_carry_location(text, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.key == key
    assert info.value.line == line
    assert info.value.column is not None


def test_sections_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("[cavity]\nkappa = 1 MHz")
    assert info.value.line == 1


def test_unknown_override():
    with pytest.raises(ConfigError) as info:
        parse_config("", ["nope=1"])
    assert info.value.key == "nope"


rates = st.floats(1e3, 1e9, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    wavelength=st.floats(4e-7, 2e-6),
    gca=rates,
    kappa=rates,
    nc=st.integers(0, 30),
    length=st.floats(1e-7, 1e-4),
    dp=st.floats(-1e9, 1e9),
    beta=st.floats(0.01, 100),
    explicit=st.booleans(),
    sweep=st.booleans(),
)
def test_roundtrip(wavelength, gca, kappa, nc, length, dp, beta, explicit, sweep):
    kw = dict(
        wavelength=wavelength,
        gamma_ca_decay=gca,
        kappa=kappa,
        photon_number=nc,
        length=length,
        detuning_p=dp,
        cooperativity=beta,
    )
    if explicit:
        kw.update(spatial_period=3.3 * wavelength, position=0.1 * wavelength, dephase_b=0.5 * kappa)
    if sweep:
        kw["sweep"] = SweepAxis("detuning_p", -gca, gca, 11)
    cfg = ScenarioConfig(**kw)
    assert parse_config(serialize_config(cfg)) == cfg
