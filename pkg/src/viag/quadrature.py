"""Composite Simpson rule with successive panel doubling.

The integrand is vectorised: ``f(x)`` receives a 1-D array of abscissae and
returns an array whose *last* axis runs over ``x``. Leading axes are a batch
of independent integrals (e.g. one per diffraction angle); each batch member
is frozen at the first level where its own estimate has converged, so a
batched call returns what one-at-a-time calls would.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError


@dataclass(frozen=True)
class QuadratureSettings:
    tol: float = 1e-10  # absolute change between successive doublings
    min_panels: int = 256
    max_panels: int = 2**18

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"quadrature tol must be positive, got {self.tol!r}")
        if self.min_panels < 2 or self.min_panels % 2:
            raise ValueError(f"min_panels must be an even integer >= 2, got {self.min_panels!r}")
        if self.max_panels < self.min_panels:
            raise ValueError("max_panels must be >= min_panels")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | np.ndarray
    delta: float | np.ndarray  # |S_2n - S_n| at acceptance
    panels: int | np.ndarray


def simpson(f, a: float, b: float, settings: QuadratureSettings = QuadratureSettings()) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]``, doubling panels until converged.

    Raises
    ------
    QuadratureError
        If any batch member has not converged at ``settings.max_panels``.
    """
    n = settings.min_panels
    x = np.linspace(a, b, n + 1)
    fx = np.asarray(f(x))
    ends = fx[..., 0] + fx[..., -1]
    odd = fx[..., 1:-1:2].sum(axis=-1)
    interior = fx[..., 1:-1].sum(axis=-1)
    h = (b - a) / n
    estimate = h / 3.0 * (ends + 4.0 * odd + 2.0 * (interior - odd))

    shape = np.shape(estimate)
    value = np.zeros(shape, dtype=np.result_type(estimate, complex))
    delta = np.full(shape, np.inf)
    panels = np.zeros(shape, dtype=np.int64)
    done = np.zeros(shape, dtype=bool)

    while True:
        if 2 * n > settings.max_panels:
            bad = ~done
            raise QuadratureError(
                f"Simpson quadrature did not converge to {settings.tol:g} within "
                f"{settings.max_panels} panels",
                previous=_pick(previous_estimate, bad) if n > settings.min_panels else None,
                last=_pick(estimate, bad),
                panels=n,
                failed=np.flatnonzero(bad),
            )
        n *= 2
        h = (b - a) / n
        # new abscissae are the midpoints of the previous grid
        mid = a + h * np.arange(1, n, 2)
        fmid = np.asarray(f(mid)).sum(axis=-1)
        previous_estimate = estimate
        estimate = h / 3.0 * (ends + 4.0 * fmid + 2.0 * interior)
        interior = interior + fmid

        change = np.abs(estimate - previous_estimate)
        newly = (~done) & (change < settings.tol)
        value = np.where(newly, estimate, value)
        delta = np.where(newly, change, delta)
        panels = np.where(newly, n, panels)
        done |= newly
        if done.all():
            break

    if value.ndim == 0:
        return QuadratureResult(complex(value), float(delta), int(panels))
    return QuadratureResult(value, delta, panels)


def _pick(arr, mask):
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return complex(arr)
    return arr[mask]
