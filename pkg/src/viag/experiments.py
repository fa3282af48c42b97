"""Deterministic scenario runners producing the tabulated results.

Each runner returns a list of :class:`ScenarioResult` tables, one per panel
and photon number. Default parameters are those of the cesium
cavity-QED VIT experiment (852 nm probe, cooperativity 3.2).
"""

from __future__ import annotations

import dataclasses
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._parallel import parallel_map
from .grating import (
    GratingGeometry,
    first_order_result,
    intensity_profile,
    transmission_sample,
)
from .oracle import default_grid, validate_chi
from .physics import AtomicMedium, CavityConfig, ProbeConfig, derive_coupling, susceptibility
from .quadrature import QuadratureSettings

TWO_PI = 2.0 * math.pi
GAMMA_CA = TWO_PI * 5.2e6
KAPPA = TWO_PI * 173e3


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ValueError(f"unknown sweep parameter {self.name!r}; choose from {sorted(SWEEPABLE)}")
        if int(self.num) != self.num or self.num < 1:
            raise ValueError(f"sweep point count must be a positive integer, got {self.num!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("sweep range must be finite")
        if self.num > 1 and self.start == self.stop:
            raise ValueError("sweep range is empty")

    def values(self):
        if self.name in _INT_FIELDS:
            lo, hi = int(round(self.start)), int(round(self.stop))
            return list(range(lo, hi + 1)) if hi >= lo else list(range(lo, hi - 1, -1))
        return np.linspace(self.start, self.stop, int(self.num)).tolist()


@dataclass(frozen=True)
class ScenarioConfig:
    """Flat, immutable parameter set (SI units, angular frequencies in rad/s).

    ``None`` in a closure field means "derive it": ``dephase_b`` follows
    ``kappa``, ``spatial_period`` is four probe wavelengths, ``position`` is
    the antinode ``spatial_period / 2`` and ``probe_rabi`` is
    ``1e-3 gamma_ca_decay``.
    """

    wavelength: float = 852e-9
    dipole_moment: float = 3.79e-29
    epsilon_0: float = 8.85e-12
    density: float = 1e18  # 1e12 cm^-3
    cooperativity: float = 3.2
    gamma_ca_decay: float = GAMMA_CA
    gamma_cb_decay: float = 0.0
    dephase_b: float | None = None
    dephase_c: float = 0.0
    kappa: float = KAPPA
    photon_number: int = 0
    spatial_period: float | None = None
    length: float = 8.0e-6
    num_periods: int = 5
    detuning_p: float = 0.0
    detuning_c: float = 0.0
    position: float | None = None
    probe_rabi: float | None = None
    quad_tol: float = 1e-10
    quad_min_panels: int = 256
    quad_max_panels: int = 2**18
    sweep: SweepAxis | None = None

    def __post_init__(self):
        # building the typed views runs their domain checks
        self.cavity()
        self.medium()
        self.probe()
        self.geometry()
        self.quadrature()

    # -- resolved closures
    @property
    def gamma_ba(self) -> float:
        return self.kappa if self.dephase_b is None else self.dephase_b

    @property
    def period(self) -> float:
        return 4.0 * self.wavelength if self.spatial_period is None else self.spatial_period

    @property
    def x(self) -> float:
        return 0.5 * self.period if self.position is None else self.position

    @property
    def omega_p(self) -> float:
        return 1e-3 * self.gamma_ca_decay if self.probe_rabi is None else self.probe_rabi

    @property
    def coupling_g(self) -> float:
        return derive_coupling(self.cooperativity, self.gamma_ca_decay, self.kappa)

    # -- typed views
    def medium(self) -> AtomicMedium:
        return AtomicMedium(
            dipole_moment=self.dipole_moment,
            density=self.density,
            gamma_ca_decay=self.gamma_ca_decay,
            gamma_cb_decay=self.gamma_cb_decay,
            dephase_b=self.gamma_ba,
            dephase_c=self.dephase_c,
            epsilon_0=self.epsilon_0,
        )

    def cavity(self) -> CavityConfig:
        return CavityConfig(self.coupling_g, self.kappa, self.photon_number, self.period)

    def probe(self) -> ProbeConfig:
        return ProbeConfig(self.wavelength, self.detuning_p, self.detuning_c)

    def geometry(self) -> GratingGeometry:
        return GratingGeometry(self.length, self.period, self.num_periods)

    def quadrature(self) -> QuadratureSettings:
        return QuadratureSettings(self.quad_tol, int(self.quad_min_panels), int(self.quad_max_panels))

    def with_overrides(self, **overrides) -> "ScenarioConfig":
        unknown = set(overrides) - set(FIELD_NAMES)
        if unknown:
            raise ValueError(f"unknown parameter(s): {sorted(unknown)}")
        return dataclasses.replace(self, **overrides)

    def resolved(self) -> dict:
        """Every parameter with closures applied, for table metadata."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name == "sweep":
                continue
            out[f.name] = getattr(self, f.name)
        out.update(
            dephase_b=self.gamma_ba,
            spatial_period=self.period,
            position=self.x,
            probe_rabi=self.omega_p,
            coupling_g=self.coupling_g,
            gamma_ca=self.medium().gamma_ca,
            n0=self.medium().n0,
        )
        if self.sweep is not None:
            s = self.sweep
            out["sweep"] = f"{s.name} {s.start!r} {s.stop!r} {s.num}"
        return out


FIELD_NAMES = tuple(f.name for f in dataclasses.fields(ScenarioConfig))
_INT_FIELDS = {"photon_number", "num_periods", "quad_min_panels", "quad_max_panels"}
SWEEPABLE = frozenset(FIELD_NAMES) - {"sweep", "quad_min_panels", "quad_max_panels", "quad_tol"}


@dataclass(frozen=True)
class ScenarioResult:
    """One emitted table: headers, row-major values and a metadata block."""

    name: str
    figure: str
    panel: str
    tag: str
    headers: tuple
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)
    series: tuple = ()  # columns drawn as curves against the first column

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.headers):
            raise ValueError(f"{self.name}: table shape {rows.shape} does not match {len(self.headers)} headers")
        if not np.all(np.isfinite(rows)):
            raise ValueError(f"{self.name}: table contains non-finite values")
        object.__setattr__(self, "rows", rows)

    @property
    def filename(self) -> str:
        return f"{self.figure}_{self.panel}_{self.tag}.csv"

    def column(self, header) -> np.ndarray:
        return self.rows[:, self.headers.index(header)]

    def to_csv(self) -> str:
        lines = [f"# scenario: {self.name}"]
        for key in sorted(self.metadata):
            lines.append(f"# {key}: {_fmt(self.metadata[key])}")
        lines.append(",".join(self.headers))
        for row in self.rows:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_fmt(v) for v in value)
    return str(value)


def _metadata(cfg: ScenarioConfig, **extra):
    q = cfg.quadrature()
    meta = {f"param.{k}": v for k, v in cfg.resolved().items()}
    meta.update(
        {
            "quadrature.method": "composite Simpson, panel doubling",
            "quadrature.tol": q.tol,
            "quadrature.min_panels": q.min_panels,
            "quadrature.max_panels": q.max_panels,
            "artifact_version": __version__,
        }
    )
    meta.update(extra)
    return meta


def _tag(n_c):
    return f"nc{int(n_c)}"


# -- point evaluators (module level so they pickle for worker processes)


def _first_order_point(overrides, cfg):
    c = cfg.with_overrides(**overrides)
    res = first_order_result(c.geometry(), c.medium(), c.cavity(), c.probe(), c.quadrature())
    return abs(res.value) ** 2, res.delta


def _profile_point(detuning_p, cfg, sin_theta):
    c = cfg.with_overrides(detuning_p=detuning_p, detuning_c=0.0)
    prof = intensity_profile(sin_theta, c.geometry(), c.medium(), c.cavity(), c.probe(), c.quadrature())
    return prof.intensity, prof.delta


def first_order_sweep(cfg, overrides_list, jobs=1):
    """First-order intensity and quadrature delta for each override set."""
    fn = functools.partial(_first_order_point, cfg=cfg)
    out = parallel_map(fn, overrides_list, jobs)
    return np.array([v for v, _ in out]), np.array([d for _, d in out])


# -- generic building blocks


def chi_spectrum(cfg: ScenarioConfig, detunings=None, figure="chi", panel="spectrum") -> ScenarioResult:
    """Susceptibility vs probe detuning at ``cfg.x`` and ``cfg.detuning_c``."""
    if detunings is None:
        detunings = np.linspace(-3.0, 3.0, 201) * cfg.gamma_ca_decay
    dps = np.asarray(detunings, dtype=float)
    medium, cavity = cfg.medium(), cfg.cavity()
    chi = susceptibility(medium, cavity.rabi_at(cfg.x), dps, cfg.detuning_c)
    value = np.atleast_1d(chi.value)
    rows = np.column_stack(
        [dps / cfg.gamma_ca_decay, value.imag, value.real, value.imag / chi.n0, value.real / chi.n0]
    )
    return ScenarioResult(
        name=f"{figure}_{panel}_{_tag(cfg.photon_number)}",
        figure=figure,
        panel=panel,
        tag=_tag(cfg.photon_number),
        headers=("detuning_p_over_gamma_ca", "im_chi", "re_chi", "im_chi_over_n0", "re_chi_over_n0"),
        rows=rows,
        metadata=_metadata(cfg, photon_number=cfg.photon_number),
        series=("im_chi", "re_chi"),
    )


def transmission_table(cfg: ScenarioConfig, positions=None, figure="transmission", panel="x") -> ScenarioResult:
    """``|T|`` and phase vs position at ``cfg.detuning_p``."""
    if positions is None:
        positions = np.linspace(0.0, 2.0 * cfg.period, 401)
    xs = np.asarray(positions, dtype=float)
    samples = transmission_sample(xs, cfg.geometry(), cfg.medium(), cfg.cavity(), cfg.probe())
    rows = np.array([[s.position / cfg.period, s.amplitude, s.phase] for s in samples])
    return ScenarioResult(
        name=f"{figure}_{panel}_{_tag(cfg.photon_number)}",
        figure=figure,
        panel=panel,
        tag=_tag(cfg.photon_number),
        headers=("x_over_period", "abs_t", "phase"),
        rows=rows,
        metadata=_metadata(cfg, photon_number=cfg.photon_number),
        series=("abs_t", "phase"),
    )


def diffraction_table(cfg: ScenarioConfig, sin_theta=None, figure="diffraction", panel="profile") -> ScenarioResult:
    """Fraunhofer intensity vs ``sin(theta)`` (default 2001 points over [-0.5, 0.5])."""
    if sin_theta is None:
        sin_theta = np.linspace(-0.5, 0.5, 2001)
    prof = intensity_profile(sin_theta, cfg.geometry(), cfg.medium(), cfg.cavity(), cfg.probe(), cfg.quadrature())
    orders = {f"order.{n}": [c.real, c.imag] for n, c in sorted(prof.order_amplitudes.items())}
    return ScenarioResult(
        name=f"{figure}_{panel}_{_tag(cfg.photon_number)}",
        figure=figure,
        panel=panel,
        tag=_tag(cfg.photon_number),
        headers=("sin_theta", "intensity", "quad_delta"),
        rows=np.column_stack([prof.sin_theta, prof.intensity, prof.delta]),
        metadata=_metadata(cfg, photon_number=cfg.photon_number, **orders),
        series=("intensity",),
    )


_AXIS_HEADERS = {
    "length": ("length_um", 1e6),
    "detuning_p": ("detuning_p_over_gamma_ca", None),
    "detuning_c": ("detuning_c_over_gamma_ca", None),
    "photon_number": ("photon_number", 1.0),
}


def sweep_table(cfg: ScenarioConfig, name, values, jobs=1, figure="first-order", panel=None, tag="all") -> ScenarioResult:
    """First-order intensity while ``name`` runs over ``values``."""
    values = list(values)
    if not values:
        raise ValueError("sweep has no points")
    intensity, delta = first_order_sweep(cfg, [{name: v} for v in values], jobs)
    header, factor = _AXIS_HEADERS.get(name, (name, 1.0))
    if factor is None:
        factor = 1.0 / cfg.gamma_ca_decay
    axis = np.asarray(values, dtype=float) * factor
    panel = panel or name
    return ScenarioResult(
        name=f"{figure}_{panel}_{tag}",
        figure=figure,
        panel=panel,
        tag=tag,
        headers=(header, "first_order_intensity", "quad_delta"),
        rows=np.column_stack([axis, intensity, delta]),
        metadata=_metadata(cfg, sweep_parameter=name, sin_theta=cfg.wavelength / cfg.period),
        series=("first_order_intensity",),
    )


def run_sweep(cfg: ScenarioConfig, jobs=1) -> list:
    """First-order intensity over the configured sweep axis (or at one point)."""
    if cfg.sweep is None:
        intensity, delta = first_order_sweep(cfg, [{}], jobs)
        return [
            ScenarioResult(
                name="first-order_point_single",
                figure="first-order",
                panel="point",
                tag=_tag(cfg.photon_number),
                headers=("first_order_intensity", "quad_delta"),
                rows=np.column_stack([intensity, delta]),
                metadata=_metadata(cfg, sin_theta=cfg.wavelength / cfg.period),
            )
        ]
    return [sweep_table(cfg, cfg.sweep.name, cfg.sweep.values(), jobs)]


# -- figure reproductions


def run_fig_chi_spectrum(cfg=None, photon_numbers=(0, 5), detunings=None, jobs=1) -> list:
    """Im/Re chi vs probe detuning at the antinode with a resonant control field."""
    cfg = cfg or ScenarioConfig()
    return [
        chi_spectrum(cfg.with_overrides(photon_number=int(n), position=None, detuning_c=0.0), detunings, "fig2", "chi")
        for n in photon_numbers
    ]


def run_fig_transmission(
    cfg=None, photon_numbers=(0, 1, 5), positions=None, detuning_amplitude=0.0, detuning_phase=None, jobs=1
) -> list:
    """Panel ``a``: |T| and phase on resonance. Panel ``b``: same at ``Dp = 0.25 Gamma_ca``
    (the resonant phase vanishes identically)."""
    cfg = cfg or ScenarioConfig()
    if detuning_phase is None:
        detuning_phase = 0.25 * cfg.gamma_ca_decay
    out = []
    for panel, dp in (("a", detuning_amplitude), ("b", detuning_phase)):
        for n in photon_numbers:
            c = cfg.with_overrides(photon_number=int(n), detuning_p=float(dp), detuning_c=0.0)
            out.append(transmission_table(c, positions, "fig3", panel))
    return out


def run_fig_diffraction(cfg=None, photon_numbers=(0, 1), sin_theta=None, jobs=1) -> list:
    """Diffraction profile on two-photon and one-photon resonance."""
    cfg = cfg or ScenarioConfig()
    return [
        diffraction_table(cfg.with_overrides(photon_number=int(n), detuning_p=0.0, detuning_c=0.0), sin_theta, "fig4", "profile")
        for n in photon_numbers
    ]


def run_fig_heatmap(cfg=None, detunings=None, sin_theta=None, photon_number=0, jobs=1) -> list:
    """Intensity over (probe detuning, sin theta) as ``(Dp/Gamma_ca, sin_theta, I)`` triples."""
    cfg = (cfg or ScenarioConfig()).with_overrides(photon_number=int(photon_number), detuning_c=0.0)
    if detunings is None:
        detunings = np.linspace(-3.0, 3.0, 121) * cfg.gamma_ca_decay
    if sin_theta is None:
        sin_theta = np.linspace(-0.5, 0.5, 401)
    dps = np.asarray(detunings, dtype=float)
    s = np.asarray(sin_theta, dtype=float)
    fn = functools.partial(_profile_point, cfg=cfg, sin_theta=s)
    results = parallel_map(fn, dps.tolist(), jobs)
    intensity = np.concatenate([r[0] for r in results])
    delta = np.concatenate([r[1] for r in results])
    dd, ss = np.meshgrid(dps / cfg.gamma_ca_decay, s, indexing="ij")
    return [
        ScenarioResult(
            name=f"fig5_heatmap_{_tag(photon_number)}",
            figure="fig5",
            panel="heatmap",
            tag=_tag(photon_number),
            headers=("detuning_p_over_gamma_ca", "sin_theta", "intensity", "quad_delta"),
            rows=np.column_stack([dd.ravel(), ss.ravel(), intensity, delta]),
            metadata=_metadata(cfg, photon_number=photon_number, grid=f"{dps.size}x{s.size}"),
            series=("intensity",),
        )
    ]


def run_fig_photon_sweep(cfg=None, photon_numbers=range(0, 21), jobs=1) -> list:
    """First-order intensity vs cavity photon number on resonance."""
    cfg = (cfg or ScenarioConfig()).with_overrides(detuning_p=0.0, detuning_c=0.0)
    return [sweep_table(cfg, "photon_number", [int(n) for n in photon_numbers], jobs, "fig6", "photon")]


def run_fig_detuning_sweep(cfg=None, photon_numbers=(0, 1, 4, 10), detunings=None, jobs=1) -> list:
    """First-order intensity vs probe detuning (control resonant) per photon number."""
    cfg = (cfg or ScenarioConfig()).with_overrides(detuning_c=0.0)
    if detunings is None:
        detunings = np.linspace(-3.0, 3.0, 201) * cfg.gamma_ca_decay
    return [
        sweep_table(cfg.with_overrides(photon_number=int(n)), "detuning_p", list(detunings), jobs, "fig7", "detuning", _tag(n))
        for n in photon_numbers
    ]


def run_fig_length_sweep(cfg=None, photon_numbers=(0, 1, 4, 10), lengths=None, jobs=1) -> list:
    """First-order intensity vs medium length on resonance per photon number."""
    cfg = (cfg or ScenarioConfig()).with_overrides(detuning_p=0.0, detuning_c=0.0)
    if lengths is None:
        lengths = np.linspace(1e-6, 17e-6, 161)
    return [
        sweep_table(cfg.with_overrides(photon_number=int(n)), "length", list(lengths), jobs, "fig8", "length", _tag(n))
        for n in photon_numbers
    ]


def run_validation(cfg=None, points=None, jobs=1):
    """Closed form vs linear-response vs Lindblad report on the default 5x21x9 grid."""
    cfg = cfg or ScenarioConfig()
    if points is None:
        points = default_grid(cfg.gamma_ca_decay, cfg.period)
    report = validate_chi(
        points,
        cfg.medium(),
        cfg.coupling_g,
        cfg.period,
        detuning_c=cfg.detuning_c,
        omega_p=cfg.omega_p,
        jobs=jobs,
    )
    return report


FIGURES = {
    "fig2": run_fig_chi_spectrum,
    "fig3": run_fig_transmission,
    "fig4": run_fig_diffraction,
    "fig5": run_fig_heatmap,
    "fig6": run_fig_photon_sweep,
    "fig7": run_fig_detuning_sweep,
    "fig8": run_fig_length_sweep,
}


def run_figure(name, cfg=None, jobs=1) -> list:
    try:
        runner = FIGURES[name]
    except KeyError:
        raise ValueError(f"unknown figure {name!r}; choose from {sorted(FIGURES)}") from None
    return runner(cfg, jobs=jobs)
