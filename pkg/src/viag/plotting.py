"""Static SVG rendering of result tables (no display server needed)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def render(result, path, log_scale=False, deterministic=True) -> Path:
    """Write ``result`` to ``path`` as SVG.

    Tables with a detuning/sin_theta/intensity triple layout are drawn as a
    colour map; everything else as one curve per series against the first
    column. With ``deterministic`` the SVG carries no date and a fixed id
    salt, so reruns are byte-identical.
    """
    path = Path(path)
    headers = list(result.headers)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        if headers[:3] == ["detuning_p_over_gamma_ca", "sin_theta", "intensity"]:
            d = result.column("detuning_p_over_gamma_ca")
            s = result.column("sin_theta")
            nd = np.unique(d).size
            ns = s.size // nd
            z = result.column("intensity").reshape(nd, ns)
            if log_scale:
                z = np.log10(np.maximum(z, 1e-30))
            mesh = ax.pcolormesh(s[:ns], d[::ns], z, shading="nearest")
            fig.colorbar(mesh, ax=ax, label="log10 intensity" if log_scale else "intensity")
            ax.set_xlabel("sin_theta")
            ax.set_ylabel("detuning_p / gamma_ca")
        else:
            x = result.rows[:, 0]
            series = result.series or tuple(headers[1:])
            for name in series:
                ax.plot(x, result.column(name), label=name)
            ax.set_xlabel(headers[0])
            ax.set_ylabel(", ".join(series))
            if log_scale:
                ax.set_yscale("log")
            if len(series) > 1:
                ax.legend()
        ax.set_title(result.name)
        fig.tight_layout()
        if deterministic:
            with matplotlib.rc_context({"svg.hashsalt": "viag"}):
                fig.savefig(path, format="svg", metadata={"Date": None})
        else:
            fig.savefig(path, format="svg")
    finally:
        plt.close(fig)
    return path
