"""Figure rendering: pass-through plotting of simulator outputs.

Numerical values are never altered or reinterpreted: the arrays handed
to matplotlib are exactly the parsed file columns, and every render
records matching checksums of the input columns and of the plotted
artist data so callers can verify the pass-through property.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    SchemaError,
    column_checksum,
    read_mode_csv,
    read_report_gains,
    read_spectrum_csv,
    read_sweep_csv,
    read_weights_manifest,
)

KINDS = ("spectrum", "weights", "k_vs_g", "g2_sweep", "modes")

# first curve dotted black, second solid red: the two-gain overlay style
SPECTRUM_STYLES = (
    {"linestyle": ":", "color": "black"},
    {"linestyle": "-", "color": "red"},
    {"linestyle": "--", "color": "tab:blue"},
    {"linestyle": "-.", "color": "tab:green"},
)


@dataclass
class RenderResult:
    path: Path
    kind: str
    input_checksums: dict = field(default_factory=dict)
    plotted_checksums: dict = field(default_factory=dict)

    @property
    def passthrough_ok(self) -> bool:
        return self.input_checksums == self.plotted_checksums


@dataclass(frozen=True)
class FigureSpec:
    """What to render: kind, input paths, axis options, output path."""

    kind: str
    inputs: tuple
    output: Path
    x_axis: str = "nm"  # "nm" | "omega" for spectra/modes

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; have {KINDS}")
        if not self.inputs:
            raise SchemaError("figure needs at least one input file")
        if self.x_axis not in ("nm", "omega"):
            raise SchemaError(f"x_axis must be 'nm' or 'omega', got {self.x_axis!r}")


def _line_checksums(ax):
    out = {}
    for line in ax.get_lines():
        label = line.get_label()
        out[label] = {
            "x": column_checksum(line.get_xdata()),
            "y": column_checksum(line.get_ydata()),
        }
    return out


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; deterministic for identical inputs."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        recorded = _RENDERERS[spec.kind](ax, spec)
        plotted = _line_checksums(ax)
        result = RenderResult(
            path=Path(spec.output),
            kind=spec.kind,
            input_checksums=recorded,
            plotted_checksums={k: plotted[k] for k in recorded},
        )
        if not result.passthrough_ok:
            raise SchemaError("plotted arrays differ from input columns")
        fig.tight_layout()
        result.path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(result.path, dpi=160)
        return result
    finally:
        plt.close(fig)


def _render_spectrum(ax, spec):
    recorded = {}
    for i, path in enumerate(spec.inputs):
        data = read_spectrum_csv(path)
        x = data.wavelength_nm if spec.x_axis == "nm" else data.omega
        style = SPECTRUM_STYLES[i % len(SPECTRUM_STYLES)]
        label = data.label
        ax.plot(x, data.intensity, label=label, **style)
        recorded[label] = {
            "x": column_checksum(x),
            "y": column_checksum(data.intensity),
        }
    ax.set_xlabel("wavelength (nm)" if spec.x_axis == "nm" else "angular frequency (rad/fs)")
    ax.set_ylabel("intensity")
    ax.legend()
    return recorded


def _render_weights(ax, spec):
    recorded = {}
    data = read_weights_manifest(spec.inputs[0])
    n = np.arange(data.lambdas.size, dtype=float)
    for label, values, style in (
        ("bare weights", data.lambdas, {"linestyle": "-", "marker": "o", "color": "black"}),
        (
            f"redistributed (G={data.gain:g})",
            data.redistributed,
            {"linestyle": "-", "marker": "s", "color": "red"},
        ),
    ):
        ax.plot(n, values, markersize=3, **style, label=label)
        recorded[label] = {"x": column_checksum(n), "y": column_checksum(values)}
    ax.set_xlabel("mode index")
    ax.set_ylabel("weight")
    ax.legend()
    return recorded


def _render_k_vs_g(ax, spec):
    gains, ks, _ = read_report_gains(spec.inputs[0])
    label = "Schmidt number"
    ax.plot(gains, ks, "o-", color="black", label=label)
    ax.set_xlabel("parametric gain")
    ax.set_ylabel("effective mode number K")
    ax.legend()
    return {label: {"x": column_checksum(gains), "y": column_checksum(ks)}}


def _render_g2_sweep(ax, spec):
    recorded = {}
    styles = ({"color": "red", "linestyle": "-"}, {"color": "black", "linestyle": "--"})
    for path in spec.inputs:
        data = read_sweep_csv(path)
        for i, gain in enumerate(sorted(set(data.gain.tolist()), reverse=True)):
            mask = data.gain == gain
            label = f"{Path(path).stem} G={gain:g}"
            ax.plot(data.value[mask], data.g2[mask],
                    **styles[i % len(styles)], label=label)
            recorded[label] = {
                "x": column_checksum(data.value[mask]),
                "y": column_checksum(data.g2[mask]),
            }
    ax.set_xlabel("swept value")
    ax.set_ylabel("g2")
    ax.legend()
    return recorded


def _render_modes(ax, spec):
    recorded = {}
    for path in spec.inputs:
        data = read_mode_csv(path)
        x = 2.0 * np.pi * 299.792458 / data.omega if spec.x_axis == "nm" else data.omega
        label = Path(path).stem
        mag = data.magnitude
        ax.plot(x, mag, label=label)
        recorded[label] = {"x": column_checksum(x), "y": column_checksum(mag)}
    ax.set_xlabel("wavelength (nm)" if spec.x_axis == "nm" else "angular frequency (rad/fs)")
    ax.set_ylabel("|mode amplitude|")
    ax.legend()
    return recorded


_RENDERERS = {
    "spectrum": _render_spectrum,
    "weights": _render_weights,
    "k_vs_g": _render_k_vs_g,
    "g2_sweep": _render_g2_sweep,
    "modes": _render_modes,
}
