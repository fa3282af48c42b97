"""Parameter model and closed-form linear susceptibility of the cavity-driven
Lambda system.

Levels are |a> (probe ground state), |b> (cavity-coupled ground state) and
|c> (shared excited state). Every rate, detuning and Rabi frequency is an
angular frequency in rad/s; lengths are in metres. Positive ``Im chi`` means
absorption of a probe written in the ``exp(-i w_p t)`` rotating frame.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar as HBAR

from .errors import DomainError, SingularParametersError

#: vacuum permittivity as quoted with the reference parameter set (F/m)
EPSILON_0 = 8.85e-12


def _require_positive(name, value):
    if not (value > 0) or not math.isfinite(value):
        raise DomainError(name, f"must be positive and finite, got {value!r}")


def _require_nonnegative(name, value):
    if not (value >= 0) or not math.isfinite(value):
        raise DomainError(name, f"must be non-negative and finite, got {value!r}")


def _require_photon_number(value):
    # Fock states only; floats (mean photon numbers) and bools are rejected
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError("photon_number", f"must be an integer Fock-state number, got {value!r}")
    if value < 0:
        raise DomainError("photon_number", f"must be >= 0, got {value!r}")


@dataclass(frozen=True)
class AtomicMedium:
    """Atomic ensemble: probe dipole moment, density and relaxation rates.

    The coherence decay rates ``gamma_ca`` and ``gamma_ba`` are derived from
    the level rates and are never stored.
    """

    dipole_moment: float  # C m, |mu_ca|
    density: float  # atoms / m^3
    gamma_ca_decay: float  # c -> a spontaneous emission
    gamma_cb_decay: float = 0.0  # c -> b spontaneous emission
    dephase_b: float = 0.0
    dephase_c: float = 0.0
    epsilon_0: float = EPSILON_0

    def __post_init__(self):
        _require_positive("dipole_moment", self.dipole_moment)
        _require_positive("density", self.density)
        _require_positive("gamma_ca_decay", self.gamma_ca_decay)
        _require_nonnegative("gamma_cb_decay", self.gamma_cb_decay)
        _require_nonnegative("dephase_b", self.dephase_b)
        _require_nonnegative("dephase_c", self.dephase_c)
        _require_positive("epsilon_0", self.epsilon_0)

    @property
    def gamma_ca(self) -> float:
        return self.dephase_c + self.gamma_cb_decay + self.gamma_ca_decay

    @property
    def gamma_ba(self) -> float:
        return self.dephase_b

    @property
    def chi_prefactor(self) -> float:
        """``|mu|^2 N / (eps0 hbar)``, in rad/s."""
        return self.dipole_moment**2 * self.density / (self.epsilon_0 * HBAR)

    @property
    def n0(self) -> float:
        """Dimensionless susceptibility scale ``|mu|^2 N / (hbar eps0 gamma_ca)``."""
        return self.chi_prefactor / self.gamma_ca


@dataclass(frozen=True)
class CavityConfig:
    coupling_g: float
    kappa: float
    photon_number: int
    spatial_period: float

    def __post_init__(self):
        _require_positive("coupling_g", self.coupling_g)
        _require_positive("kappa", self.kappa)
        _require_photon_number(self.photon_number)
        _require_positive("spatial_period", self.spatial_period)

    @classmethod
    def from_cooperativity(cls, beta, gamma_ca_decay, kappa, photon_number, spatial_period):
        g = derive_coupling(beta, gamma_ca_decay, kappa)
        return cls(g, kappa, photon_number, spatial_period)

    def cooperativity(self, gamma_ca_decay: float) -> float:
        _require_positive("gamma_ca_decay", gamma_ca_decay)
        return 4.0 * self.coupling_g**2 / (gamma_ca_decay * self.kappa)

    @property
    def omega0(self) -> float:
        return rabi_amplitude(self.coupling_g, self.photon_number)

    def rabi_at(self, x):
        return rabi_at(x, self.omega0, self.spatial_period)


@dataclass(frozen=True)
class ProbeConfig:
    wavelength: float
    detuning_p: float = 0.0  # w_ca - w_p
    detuning_c: float = 0.0  # w_cb - w_c

    def __post_init__(self):
        _require_positive("wavelength", self.wavelength)
        if not (math.isfinite(self.detuning_p) and math.isfinite(self.detuning_c)):
            raise DomainError("detuning", "detunings must be finite")

    @property
    def k_p(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def delta(self) -> float:
        """Two-photon (Raman) detuning."""
        return self.detuning_p - self.detuning_c


@dataclass(frozen=True)
class Susceptibility:
    """Complex linear susceptibility; ``value`` may be a scalar or an array.

    ``n0`` is carried along so results can be quoted scale-free.
    """

    value: complex | np.ndarray
    n0: float

    @property
    def real(self):
        """Dispersive part."""
        return np.real(self.value)

    @property
    def imag(self):
        """Absorptive part."""
        return np.imag(self.value)

    @property
    def scaled(self):
        return self.value / self.n0


def derive_coupling(beta: float, gamma_ca_decay: float, kappa: float) -> float:
    """Atom-cavity coupling ``g`` from the cooperativity ``4 g^2 / (Gamma_ca kappa)``."""
    _require_positive("beta", beta)
    _require_positive("gamma_ca_decay", gamma_ca_decay)
    _require_positive("kappa", kappa)
    return math.sqrt(beta * gamma_ca_decay * kappa) / 2.0


def rabi_amplitude(coupling_g: float, photon_number: int) -> float:
    """Peak control Rabi frequency ``2 g sqrt(n_c + 1)`` of an n_c-photon Fock state."""
    _require_positive("coupling_g", coupling_g)
    _require_photon_number(photon_number)
    return 2.0 * coupling_g * math.sqrt(photon_number + 1)


def rabi_at(x, omega0, spatial_period):
    """Standing-wave control Rabi frequency ``omega0 sin(pi x / period)``."""
    _require_positive("spatial_period", spatial_period)
    return omega0 * np.sin(np.pi * np.asarray(x, dtype=float) / spatial_period)


def _check_rates(medium):
    if not medium.gamma_ca > 0:
        raise DomainError("gamma_ca", f"coherence decay must be positive, got {medium.gamma_ca!r}")


def susceptibility(medium: AtomicMedium, omega_c, detuning_p, detuning_c) -> Susceptibility:
    """Linear probe susceptibility in the N_0-normalised rational form.

    Parameters
    ----------
    medium : AtomicMedium
    omega_c : float or array
        Local control Rabi frequency (rad/s).
    detuning_p, detuning_c : float or array
        One-photon probe and control detunings (rad/s). Arguments broadcast.

    Raises
    ------
    SingularParametersError
        If the denominator vanishes (only possible for ``gamma_ba = 0`` with
        zero two-photon detuning and no control field).
    """
    _check_rates(medium)
    gca, gba = medium.gamma_ca, medium.gamma_ba
    omega_c = np.asarray(omega_c, dtype=float)
    dp = np.asarray(detuning_p, dtype=float)
    delta = dp - np.asarray(detuning_c, dtype=float)
    oc2 = np.abs(omega_c) ** 2

    num = (4.0 * delta * (-oc2 + 4.0 * delta * dp) + 4.0 * dp * gba**2) + 1j * (
        8.0 * delta**2 * gca + 2.0 * gba * (oc2 + gba * gca)
    )
    den = oc2 / gca + gba - 4.0 * dp * delta / gca + 2j * delta + 2j * dp * gba / gca
    den2 = np.abs(den) ** 2
    if np.any(den2 == 0.0):
        raise SingularParametersError(
            "susceptibility denominator vanishes (gamma_ba = 0, delta = 0, omega_c = 0)"
        )
    n0 = medium.n0
    value = n0 * (num / den2) / gca
    if value.ndim == 0:
        value = complex(value)
    return Susceptibility(value, n0)


def susceptibility_appendix(medium: AtomicMedium, omega_c, detuning_p, detuning_c) -> Susceptibility:
    """Same susceptibility written with the un-normalised denominator
    ``|Omega_c^2 + (gamma_ca + 2i Dp)(gamma_ba + 2i delta)|^2``.

    Algebraically identical to :func:`susceptibility`; kept as an independent
    evaluation path for cross-checks.
    """
    _check_rates(medium)
    gca, gba = medium.gamma_ca, medium.gamma_ba
    omega_c = np.asarray(omega_c, dtype=float)
    dp = np.asarray(detuning_p, dtype=float)
    delta = dp - np.asarray(detuning_c, dtype=float)
    oc2 = np.abs(omega_c) ** 2

    big_a = oc2 + (gca + 2j * dp) * (gba + 2j * delta)
    a2 = big_a.real**2 + big_a.imag**2
    if np.any(a2 == 0.0):
        raise SingularParametersError("susceptibility denominator vanishes")
    dispersive = (4.0 * delta * (-oc2 + 4.0 * delta * dp) + 4.0 * dp * gba**2) / a2
    absorptive = (8.0 * delta**2 * gca + 2.0 * gba * (oc2 + gba * gca)) / a2
    value = medium.chi_prefactor * (dispersive + 1j * absorptive)
    if value.ndim == 0:
        value = complex(value)
    return Susceptibility(value, medium.n0)
