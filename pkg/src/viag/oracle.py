"""Independent checks of the closed-form susceptibility.

Two routes are provided:

* the linear-response pair of coupled steady-state equations for the probe
  coherence ``rho_ca`` and the ground-state coherence ``rho_ba``, solved as a
  2x2 linear system (all atoms in |a>, ``rho_bc`` dropped);
* the full three-level Lindblad steady state at a finite probe Rabi
  frequency, with no population closure and ``rho_bc`` retained.

Dissipation channels of the Lindblad model, with
``D[s] rho = (r/2)(s^+ s rho + rho s^+ s - 2 s rho s^+)`` subtracted from the
coherent part:

=================  ==========  =======
operator ``s``     rate ``r``  effect
=================  ==========  =======
``|a><c|``         Gamma_ca    decay c -> a
``|b><c|``         Gamma_cb    decay c -> b
``|b><b|``         gamma_b     dephasing of b
``|c><c|``         gamma_c     dephasing of c
=================  ==========  =======

With this normalisation ``rho_ca`` relaxes at ``(gamma_c + Gamma_cb +
Gamma_ca)/2`` and ``rho_ba`` at ``gamma_b/2``, the same halves that appear in
the linear-response equations, so a dephasing channel carries the bare
dephasing rate (not twice it).
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import parallel_map
from .errors import RankDeficientError, SingularParametersError, ViagError
from .physics import AtomicMedium, rabi_amplitude, rabi_at, susceptibility

A, B, C = 0, 1, 2
_PAIRS = ((A, B), (A, C), (B, C))

#: relative singular-value threshold for the stationary-state rank check
RANK_TOL = 1e-9


@dataclass(frozen=True)
class DensityMatrix3:
    """3x3 density matrix in the (|a>, |b>, |c>) basis."""

    matrix: np.ndarray

    def element(self, i, j) -> complex:
        return complex(self.matrix[i, j])

    @property
    def rho_ca(self) -> complex:
        return self.element(C, A)

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def check(self, herm_tol=1e-12, trace_tol=1e-12, psd_tol=1e-10):
        """Raise ``ValueError`` if any density-matrix invariant is violated."""
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > herm_tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > trace_tol:
            raise ValueError(f"trace is {np.trace(m)!r}, not 1")
        pops = self.populations
        if np.any(pops < -psd_tol) or np.any(pops > 1 + psd_tol):
            raise ValueError(f"populations outside [0, 1]: {pops!r}")
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -psd_tol:
            raise ValueError("density matrix is not positive semidefinite")
        return self


# -- linear response -------------------------------------------------------


def steady_rho_ca_linear(medium: AtomicMedium, omega_p, omega_c, detuning_p, detuning_c) -> complex:
    """Probe coherence to first order in the probe, from the coupled pair

    ``(gamma_ca + 2i Dp) rho_ca - i Oc rho_ba = i Op``
    ``-i Oc rho_ca + (gamma_ba + 2i delta) rho_ba = 0``
    """
    gca, gba = medium.gamma_ca, medium.gamma_ba
    delta = detuning_p - detuning_c
    m = np.array(
        [
            [gca + 2j * detuning_p, -1j * omega_c],
            [-1j * omega_c, gba + 2j * delta],
        ]
    )
    rhs = np.array([1j * omega_p, 0.0])
    scale = np.max(np.abs(m))
    if scale == 0 or abs(np.linalg.det(m / scale)) < 1e-15:
        raise SingularParametersError("linear-response system is singular")
    return complex(np.linalg.solve(m, rhs)[0])


def chi_from_rho_ca(medium: AtomicMedium, rho_ca, omega_p) -> complex:
    """``chi = 2 |mu|^2 N rho_ca / (eps0 hbar Omega_p)``."""
    return 2.0 * medium.chi_prefactor * rho_ca / omega_p


# -- full Lindblad steady state ---------------------------------------------


def _from_params(p):
    rho = np.zeros((3, 3), dtype=complex)
    rho[A, A], rho[B, B], rho[C, C] = p[0], p[1], p[2]
    for k, (i, j) in enumerate(_PAIRS):
        z = p[3 + 2 * k] + 1j * p[4 + 2 * k]
        rho[i, j] = z
        rho[j, i] = np.conj(z)
    return rho


def _to_params(rho):
    p = np.empty(9)
    p[0], p[1], p[2] = rho[A, A].real, rho[B, B].real, rho[C, C].real
    for k, (i, j) in enumerate(_PAIRS):
        p[3 + 2 * k] = rho[i, j].real
        p[4 + 2 * k] = rho[i, j].imag
    return p


def _ket_bra(i, j):
    m = np.zeros((3, 3))
    m[i, j] = 1.0
    return m


def hamiltonian(omega_p, omega_c, detuning_p, delta):
    """Rotating-frame Hamiltonian / hbar with real Rabi frequencies."""
    h = np.zeros((3, 3), dtype=complex)
    h[B, B] = delta
    h[C, C] = detuning_p
    h[C, A] = h[A, C] = -0.5 * omega_p
    h[C, B] = h[B, C] = -0.5 * omega_c
    return h


def collapse_channels(medium: AtomicMedium):
    return [
        (_ket_bra(A, C), medium.gamma_ca_decay),
        (_ket_bra(B, C), medium.gamma_cb_decay),
        (_ket_bra(B, B), medium.dephase_b),
        (_ket_bra(C, C), medium.dephase_c),
    ]


def liouvillian(medium, omega_p, omega_c, detuning_p, detuning_c, scale=1.0):
    """Real 9x9 generator acting on the Hermitian parameter vector.

    Parameters are ``(rho_aa, rho_bb, rho_cc, Re/Im rho_ab, Re/Im rho_ac,
    Re/Im rho_bc)``. All frequencies are divided by ``scale``.
    """
    h = hamiltonian(omega_p, omega_c, detuning_p, detuning_p - detuning_c) / scale
    channels = [(s, r / scale) for s, r in collapse_channels(medium) if r > 0]

    def generator(rho):
        out = -1j * (h @ rho - rho @ h)
        for s, r in channels:
            sds = s.T @ s
            out -= 0.5 * r * (sds @ rho + rho @ sds - 2.0 * s @ rho @ s.T)
        return out

    eye = np.eye(9)
    return np.column_stack([_to_params(generator(_from_params(eye[k]))) for k in range(9)])


def _null_space_dim(lv):
    sv = np.linalg.svd(lv, compute_uv=False)
    return int(np.sum(sv <= RANK_TOL * sv[0]))


def lindblad_steady_state(
    medium: AtomicMedium, omega_p, omega_c, detuning_p, detuning_c, initial=None
) -> DensityMatrix3:
    """Stationary state of the three-level master equation.

    The unique steady state is found by replacing the ``rho_aa`` row of the
    generator with the trace condition and solving directly (LU with partial
    pivoting). When the stationary state is not unique (e.g. |b> decoupled
    because ``omega_c = 0`` and ``Gamma_cb = 0``) a ``RankDeficientError`` is
    raised, unless ``initial`` is given: then the long-time limit reached from
    that density matrix is returned, via the spectral projector onto the
    null space.
    """
    rates = [medium.gamma_ca_decay, medium.gamma_cb_decay, medium.dephase_b, medium.dephase_c]
    if not any(r > 0 for r in rates):
        raise ViagError("at least one dissipation rate must be non-zero")
    scale = medium.gamma_ca
    lv = liouvillian(medium, omega_p, omega_c, detuning_p, detuning_c, scale)

    null_dim = _null_space_dim(lv)
    if null_dim == 1:
        a = lv.copy()
        a[0, :] = 0.0
        a[0, :3] = 1.0
        rhs = np.zeros(9)
        rhs[0] = 1.0
        p = np.linalg.solve(a, rhs)
    elif initial is None:
        raise RankDeficientError(null_dim)
    else:
        u, sv, vh = np.linalg.svd(lv)
        right = vh[-null_dim:].T
        left = u[:, -null_dim:]
        proj = right @ np.linalg.solve(left.T @ right, left.T)
        p = proj @ _to_params(np.asarray(initial, dtype=complex))

    rho = _from_params(p)
    return DensityMatrix3(rho)


def ground_state():
    rho = np.zeros((3, 3), dtype=complex)
    rho[A, A] = 1.0
    return rho


# -- validation report -------------------------------------------------------


@dataclass(frozen=True)
class ValidationRecord:
    photon_number: int
    detuning_p: float
    x: float
    omega_c: float
    chi_closed: complex
    chi_linear: complex
    chi_lindblad: complex  # at the working probe Rabi frequency
    chi_lindblad_fine: complex  # at a tenth of it
    chi_extrapolated: complex  # Richardson, assuming O(Omega_p^2) error
    dev_linear: float
    dev_lindblad: float
    dev_extrapolated: float
    richardson_ratio: float  # err(Op) / err(Op/10), 100 for pure quadratic
    ok: bool

    def to_dict(self):
        out = {}
        for k, v in self.__dict__.items():
            out[k] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


@dataclass(frozen=True)
class ValidationReport:
    records: list
    tol_linear: float
    tol_lindblad: float
    omega_p: float
    settings: dict = field(default_factory=dict)

    @property
    def max_dev_linear(self) -> float:
        return max(r.dev_linear for r in self.records)

    @property
    def max_dev_lindblad(self) -> float:
        return max(r.dev_lindblad for r in self.records)

    @property
    def max_dev_extrapolated(self) -> float:
        return max(r.dev_extrapolated for r in self.records)

    @property
    def richardson_range(self):
        ratios = [r.richardson_ratio for r in self.records if math.isfinite(r.richardson_ratio)]
        return (min(ratios), max(ratios)) if ratios else (math.nan, math.nan)

    @property
    def failing(self):
        return [r for r in self.records if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failing

    def summary(self) -> dict:
        lo, hi = self.richardson_range
        return {
            "record": "summary",
            "points": len(self.records),
            "omega_p": self.omega_p,
            "tol_linear": self.tol_linear,
            "tol_lindblad": self.tol_lindblad,
            "max_dev_linear": self.max_dev_linear,
            "max_dev_lindblad": self.max_dev_lindblad,
            "max_dev_extrapolated": self.max_dev_extrapolated,
            "richardson_ratio_min": lo,
            "richardson_ratio_max": hi,
            "failing": len(self.failing),
            "ok": self.ok,
            **self.settings,
        }

    def to_jsonl(self) -> str:
        """One JSON object per line: every point, then a summary line."""
        lines = [json.dumps({"record": "point", **r.to_dict()}, sort_keys=True) for r in self.records]
        lines.append(json.dumps(self.summary(), sort_keys=True))
        return "\n".join(lines) + "\n"


def _rel(a, b):
    ref = abs(b)
    return abs(a - b) / ref if ref > 0 else abs(a - b)


def _validate_point(point, medium, coupling_g, spatial_period, detuning_c, omega_p, tol_linear, tol_lindblad):
    n_c, dp, x = point
    oc = float(rabi_at(x, rabi_amplitude(coupling_g, int(n_c)), spatial_period))
    closed = susceptibility(medium, oc, dp, detuning_c).value
    linear = chi_from_rho_ca(medium, steady_rho_ca_linear(medium, omega_p, oc, dp, detuning_c), omega_p)

    def lindblad_chi(op):
        rho = lindblad_steady_state(medium, op, oc, dp, detuning_c, initial=ground_state())
        return chi_from_rho_ca(medium, rho.rho_ca, op)

    coarse = lindblad_chi(omega_p)
    fine = lindblad_chi(omega_p / 10.0)
    extrapolated = (100.0 * fine - coarse) / 99.0
    err_coarse, err_fine = abs(coarse - closed), abs(fine - closed)
    ratio = err_coarse / err_fine if err_fine > 0 else math.inf
    dev_linear = _rel(linear, closed)
    dev_lindblad = _rel(coarse, closed)
    return ValidationRecord(
        photon_number=int(n_c),
        detuning_p=float(dp),
        x=float(x),
        omega_c=oc,
        chi_closed=complex(closed),
        chi_linear=complex(linear),
        chi_lindblad=complex(coarse),
        chi_lindblad_fine=complex(fine),
        chi_extrapolated=complex(extrapolated),
        dev_linear=dev_linear,
        dev_lindblad=dev_lindblad,
        dev_extrapolated=_rel(extrapolated, closed),
        richardson_ratio=ratio,
        ok=bool(dev_linear < tol_linear and dev_lindblad < tol_lindblad),
    )


def validate_chi(
    points,
    medium: AtomicMedium,
    coupling_g: float,
    spatial_period: float,
    detuning_c: float = 0.0,
    omega_p: float | None = None,
    tol_linear: float = 1e-10,
    tol_lindblad: float = 1e-4,
    jobs: int = 1,
) -> ValidationReport:
    """Compare closed form, 2x2 linear solve and weak-probe Lindblad solve.

    ``points`` is an iterable of ``(photon_number, detuning_p, x)``. The
    Lindblad solve is run at ``omega_p`` (default ``1e-3 Gamma_ca``) and at a
    tenth of it. Points out of tolerance are flagged, never raised.
    """
    points = [tuple(p) for p in points]
    if not points:
        raise ValueError("validation grid is empty")
    if omega_p is None:
        omega_p = 1e-3 * medium.gamma_ca_decay
    fn = functools.partial(
        _validate_point,
        medium=medium,
        coupling_g=coupling_g,
        spatial_period=spatial_period,
        detuning_c=detuning_c,
        omega_p=omega_p,
        tol_linear=tol_linear,
        tol_lindblad=tol_lindblad,
    )
    records = parallel_map(fn, points, jobs)
    return ValidationReport(records, tol_linear, tol_lindblad, omega_p)


def default_grid(gamma_ca_decay, spatial_period, photon_numbers=(0, 1, 4, 10, 20), detuning_span=3.0, n_detuning=21, n_x=9):
    """5 x 21 x 9 grid over (n_c, Dp, x): Dp in [-3, 3] Gamma_ca, x over one period."""
    dps = np.linspace(-detuning_span, detuning_span, n_detuning) * gamma_ca_decay
    xs = np.linspace(0.0, spatial_period, n_x)
    return [(n, float(dp), float(x)) for n in photon_numbers for dp in dps for x in xs]
