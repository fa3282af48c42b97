"""Transmission function of the atomic grating and its Fraunhofer diffraction.

The incident probe is a unit-amplitude plane wave, so every intensity here is
relative to the incident intensity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, QuadratureError
from .physics import AtomicMedium, CavityConfig, ProbeConfig, Susceptibility, susceptibility
from .quadrature import QuadratureSettings, simpson

# sin(theta) values are processed in blocks to bound the sample matrix size
_BLOCK = 128


@dataclass(frozen=True)
class GratingGeometry:
    length: float  # medium length along z (m)
    spatial_period: float  # m
    num_periods: int = 5

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise DomainError("length", f"must be positive, got {self.length!r}")
        if not (self.spatial_period > 0 and math.isfinite(self.spatial_period)):
            raise DomainError("spatial_period", f"must be positive, got {self.spatial_period!r}")
        if isinstance(self.num_periods, bool) or int(self.num_periods) != self.num_periods or self.num_periods < 1:
            raise DomainError("num_periods", f"must be an integer >= 1, got {self.num_periods!r}")


@dataclass(frozen=True)
class TransmissionSample:
    position: float
    value: complex
    phase: float  # k_p l Re(chi) / 2, not wrapped

    @property
    def amplitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class DiffractionProfile:
    sin_theta: np.ndarray
    intensity: np.ndarray
    order_amplitudes: dict = field(default_factory=dict)  # order n -> c_n
    delta: np.ndarray | None = None  # quadrature convergence per point

    @property
    def samples(self):
        return list(zip(self.sin_theta.tolist(), self.intensity.tolist()))


def transmission(geometry: GratingGeometry, chi, k_p: float):
    """Field transmission ``exp(i k_p chi l / 2)`` of a slab with susceptibility ``chi``.

    Split as ``exp(-k_p chi'' l/2) exp(i k_p chi' l/2)`` so that a passive
    medium (``chi'' >= 0``) always gives ``|T| <= 1``.
    """
    value = chi.value if isinstance(chi, Susceptibility) else chi
    value = np.asarray(value, dtype=complex)
    half = 0.5 * k_p * geometry.length
    out = np.exp(-half * value.imag) * np.exp(1j * half * value.real)
    return complex(out) if out.ndim == 0 else out


def _check_periods(geometry, cavity):
    if not math.isclose(geometry.spatial_period, cavity.spatial_period, rel_tol=1e-12):
        raise DomainError(
            "spatial_period",
            f"grating ({geometry.spatial_period!r}) and cavity ({cavity.spatial_period!r}) disagree",
        )


def local_susceptibility(x, medium: AtomicMedium, cavity: CavityConfig, probe: ProbeConfig):
    return susceptibility(medium, cavity.rabi_at(x), probe.detuning_p, probe.detuning_c)


def transmission_function(geometry, medium, cavity, probe):
    """Return ``T(x)`` as a vectorised callable of position (m)."""
    _check_periods(geometry, cavity)

    def t_of_x(x):
        return transmission(geometry, local_susceptibility(x, medium, cavity, probe), probe.k_p)

    return t_of_x


def transmission_sample(x, geometry, medium, cavity, probe):
    """Transmission at ``x`` with amplitude and unwrapped phase; arrays give lists."""
    _check_periods(geometry, cavity)
    chi = local_susceptibility(x, medium, cavity, probe)
    t = transmission(geometry, chi, probe.k_p)
    phase = 0.5 * probe.k_p * geometry.length * chi.real
    if np.ndim(t) == 0:
        return TransmissionSample(float(x), t, float(phase))
    return [
        TransmissionSample(float(xi), complex(ti), float(pi))
        for xi, ti, pi in zip(np.asarray(x, dtype=float), t, phase)
    ]


def fourier_integral(t_of_x, frequency, period, settings=QuadratureSettings()):
    """``(1/period) * integral_0^period T(x) exp(-2 pi i frequency x) dx``.

    ``frequency`` (1/m) may be an array; the result has its shape. The
    integral is taken over ``u = x / period`` in [0, 1], so the convergence
    tolerance applies to the normalised amplitude itself.
    """
    freq = np.asarray(frequency, dtype=float)
    cycles = freq.reshape(-1) * period

    def integrand(u):
        return t_of_x(u * period)[None, :] * np.exp(-2j * np.pi * np.outer(cycles, u))

    res = simpson(integrand, 0.0, 1.0, settings)
    value = np.reshape(res.value, freq.shape)
    delta = np.reshape(res.delta, freq.shape)
    panels = np.reshape(res.panels, freq.shape)
    if freq.ndim == 0:
        return type(res)(complex(value), float(delta), int(panels))
    return type(res)(value, delta, panels)


def single_period_amplitude(theta_sin, geometry, medium, cavity, probe, settings=QuadratureSettings()) -> complex:
    """Single-period diffraction amplitude at one ``sin(theta)``."""
    t_of_x = transmission_function(geometry, medium, cavity, probe)
    return fourier_integral(t_of_x, theta_sin / probe.wavelength, geometry.spatial_period, settings).value


def fourier_coefficients(t_of_x, orders, period, settings=QuadratureSettings()) -> dict:
    """Fourier-series coefficients ``c_n`` of ``T`` over one period."""
    orders = [int(n) for n in orders]
    res = fourier_integral(t_of_x, np.asarray(orders, dtype=float) / period, period, settings)
    return {n: complex(c) for n, c in zip(orders, np.atleast_1d(res.value))}


def mean_square(t_of_x, period, settings=QuadratureSettings()) -> float:
    """``(1/period) integral |T|^2 dx``; upper bound for the sum of ``|c_n|^2``."""
    res = simpson(lambda u: np.abs(t_of_x(u * period)) ** 2, 0.0, 1.0, settings)
    return float(np.real(res.value))


def grating_factor(theta_sin, num_periods: int, ratio: float):
    """M-period interference factor ``sin^2(M u) / (M sin u)^2``, ``u = pi ratio sin(theta)``.

    ``ratio`` is period / wavelength. Within 1e-8 of a Bragg angle the 0/0 is
    replaced by its limit written in ``eps = u - n pi``, which is exactly 1 on
    the Bragg angle itself.
    """
    if num_periods < 1:
        raise DomainError("num_periods", f"must be >= 1, got {num_periods!r}")
    m = int(num_periods)
    u = np.pi * ratio * np.asarray(theta_sin, dtype=float)
    su = np.sin(u)
    near = np.abs(su) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.sin(m * u) ** 2 / (m * su) ** 2
    eps = u - np.round(u / np.pi) * np.pi
    # np.sinc(t) = sin(pi t)/(pi t)
    limit = (np.sinc(m * eps / np.pi) / np.sinc(eps / np.pi)) ** 2
    out = np.where(near, limit, direct)
    return float(out) if out.ndim == 0 else out


def intensity_profile(theta_grid, geometry, medium, cavity, probe, settings=QuadratureSettings(), orders=None):
    """Fraunhofer intensity ``|F(theta)|^2 * grating_factor`` over a ``sin(theta)`` grid.

    ``order_amplitudes`` of the result holds ``c_n`` for every order whose
    Bragg angle lies inside the grid range (override with ``orders``).
    """
    t_of_x = transmission_function(geometry, medium, cavity, probe)
    return profile_from_transmission(t_of_x, theta_grid, geometry, probe.wavelength, settings, orders)


def profile_from_transmission(t_of_x, theta_grid, geometry, wavelength, settings=QuadratureSettings(), orders=None):
    """:func:`intensity_profile` for an arbitrary vectorised ``T(x)``."""
    s = np.asarray(theta_grid, dtype=float).reshape(-1)
    if s.size == 0:
        raise ValueError("theta grid is empty")
    if np.any(np.abs(s) > 1.0):
        raise DomainError("sin_theta", "grid values must lie in [-1, 1]")
    period, lam = geometry.spatial_period, wavelength

    amp = np.empty(s.size, dtype=complex)
    delta = np.empty(s.size)
    for start in range(0, s.size, _BLOCK):
        block = s[start : start + _BLOCK]
        try:
            res = fourier_integral(t_of_x, block / lam, period, settings)
        except QuadratureError as exc:
            bad = block[exc.failed] if exc.failed is not None and len(exc.failed) else block
            raise QuadratureError(
                f"{exc} (first failing sin_theta = {bad[0]!r})",
                exc.previous,
                exc.last,
                exc.panels,
                None if exc.failed is None else exc.failed + start,
            ) from exc
        amp[start : start + _BLOCK] = res.value
        delta[start : start + _BLOCK] = res.delta

    intensity = np.abs(amp) ** 2 * grating_factor(s, geometry.num_periods, period / lam)

    if orders is None:
        n_max = int(math.floor(np.max(np.abs(s)) * period / lam + 1e-9))
        orders = range(-n_max, n_max + 1)
    coeffs = fourier_coefficients(t_of_x, orders, period, settings)
    return DiffractionProfile(s, intensity, coeffs, delta)


def first_order_result(geometry, medium, cavity, probe, settings=QuadratureSettings()):
    """Quadrature result for the first-order amplitude ``c_1``.

    The integral sits inside the modulus (a Fourier coefficient) with kernel
    ``exp(-2 pi i x / period)``, i.e. ``sin(theta) = lambda / period``.
    """
    t_of_x = transmission_function(geometry, medium, cavity, probe)
    period = geometry.spatial_period
    return fourier_integral(t_of_x, 1.0 / period, period, settings)


def first_order_intensity(geometry, medium, cavity, probe, settings=QuadratureSettings()) -> float:
    """Intensity diffracted into the first Bragg order, ``|c_1|^2``.

    The grating factor is exactly one at the Bragg angle, so it drops out.
    """
    return abs(first_order_result(geometry, medium, cavity, probe, settings).value) ** 2
