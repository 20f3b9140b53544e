"""Serialization of results.

Domain objects are converted to the pydantic report models of
``specwin.types`` and back; every JSON artifact re-parses into the object it
came from. CSV files use fixed headers and ``repr``-exact float formatting
so that equal inputs produce byte-identical files. Spectrum plots are
written as plain SVG.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from html import escape
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel

from ..types import (
    ClassificationReport,
    ProvenanceModel,
    RadiusReport,
    SpectrumReport,
    SpectrumShape,
    WitnessReport,
    WitnessStageReport,
)
from ..utils.validation import complex_to_pair, pair_to_complex
from .mobius import Classification
from .oracle import Provenance, RadiusBound, SpectrumSet
from .truncation import PseudospectrumField
from .witness import WitnessRun, WitnessStage

# ---------------------------------------------------------------------------
# Report models
# ---------------------------------------------------------------------------


def plain(value: Any) -> Any:
    """Numpy scalars, tuples and complex numbers as JSON-native values."""
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, complex):
        return list(complex_to_pair(value))
    return value


def classification_report(info: Classification) -> ClassificationReport:
    return ClassificationReport(
        kind=info.kind,
        period=info.period,
        fixed_points=[complex_to_pair(p) for p in info.fixed_points],
        denjoy_wolff=complex_to_pair(info.denjoy_wolff) if info.denjoy_wolff is not None else None,
        multiplier=complex_to_pair(info.multiplier),
        rational_cutoff=info.rational_cutoff,
        rational_tolerance=info.rational_tolerance,
    )


def classification_from_report(report: ClassificationReport) -> Classification:
    return Classification(
        report.kind,
        tuple(pair_to_complex(p) for p in report.fixed_points),
        pair_to_complex(report.denjoy_wolff) if report.denjoy_wolff is not None else None,
        pair_to_complex(report.multiplier),
        period=report.period,
        rational_cutoff=report.rational_cutoff,
        rational_tolerance=report.rational_tolerance,
    )


def spectrum_report(spectrum: SpectrumSet, *, include_points: bool = True) -> SpectrumReport:
    """Shape, parameters and provenance; sampled closures carry their points unless excluded."""
    points = None
    if include_points and spectrum.points is not None:
        points = [complex_to_pair(p) for p in spectrum.points]
    return SpectrumReport(
        shape=spectrum.shape,
        parameters={k: float(v) for k, v in spectrum.parameters.items()},
        n0=spectrum.n0,
        points=points,
        membership=spectrum.membership,
        provenance=ProvenanceModel(
            rule=spectrum.provenance.rule,
            origin=spectrum.provenance.origin,
            inputs=plain(spectrum.provenance.inputs),
        ),
    )


def spectrum_from_report(report: SpectrumReport) -> SpectrumSet:
    points = None
    if report.points is not None:
        points = np.array([pair_to_complex(p) for p in report.points], dtype=complex)
    provenance = Provenance(report.provenance.rule, report.provenance.origin, dict(report.provenance.inputs))
    return SpectrumSet(
        report.shape,
        dict(report.parameters),
        provenance,
        points=points,
        n0=report.n0,
        membership=report.membership,
    )


def radius_report(bound: RadiusBound) -> RadiusReport:
    return RadiusReport(value=float(bound.value), kind=bound.kind, details=plain(bound.details))


def radius_from_report(report: RadiusReport) -> RadiusBound:
    return RadiusBound(report.value, report.kind, dict(report.details))


def witness_report(run: WitnessRun) -> WitnessReport:
    """The run without its kernel vectors."""
    stages = [
        WitnessStageReport(
            index=stage.index,
            n=stage.n,
            residual=stage.residual,
            floor=stage.floor,
            norm=stage.norm,
            point=complex_to_pair(stage.point) if stage.point is not None else None,
            lam=complex_to_pair(stage.lam) if stage.lam is not None else None,
        )
        for stage in run.stages
    ]
    return WitnessReport(
        construction=run.construction, lam=complex_to_pair(run.lam), stages=stages, metadata=plain(run.metadata)
    )


def witness_from_report(report: WitnessReport) -> WitnessRun:
    """Rebuild a run; stage vectors are not serialized and come back as None."""
    stages = [
        WitnessStage(
            stage.index,
            stage.n,
            None,
            stage.residual,
            stage.floor,
            stage.norm,
            point=pair_to_complex(stage.point) if stage.point is not None else None,
            lam=pair_to_complex(stage.lam) if stage.lam is not None else None,
        )
        for stage in report.stages
    ]
    return WitnessRun(report.construction, pair_to_complex(report.lam), stages, dict(report.metadata))


def to_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2, by_alias=True) + "\n"


def write_json(path: Path, model: BaseModel) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(model), encoding="utf-8")
    return path


def write_plain_json(path: Path, data: Mapping[str, Any]) -> Path:
    """Summaries without a report model (eigenvalue lists, matrix dumps)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(plain(data), indent=2) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buffer.getvalue(), encoding="utf-8")
    return path


def write_field_csv(path: Path, field: PseudospectrumField) -> Path:
    """Header ``re,im,sigma_min``, rows in grid order (imaginary part outer)."""
    return _write_csv(path, ("re", "im", "sigma_min"), field.rows())


def write_points_csv(path: Path, points: np.ndarray) -> Path:
    """Header ``re,im``."""
    return _write_csv(path, ("re", "im"), ((float(p.real), float(p.imag)) for p in np.asarray(points).ravel()))


def write_ergodic_csv(path: Path, trace: Sequence[tuple[int, float]]) -> Path:
    """Header ``n,average``."""
    return _write_csv(path, ("n", "average"), ((int(n), float(avg)) for n, avg in trace))


def write_residuals_csv(path: Path, run: WitnessRun) -> Path:
    """Header ``stage,n,residual,floor,norm``."""
    return _write_csv(
        path,
        ("stage", "n", "residual", "floor", "norm"),
        ((s.index, s.n, float(s.residual), float(s.floor), float(s.norm)) for s in run.stages),
    )


def write_radius_csv(path: Path, sequence: Sequence[float]) -> Path:
    """Header ``n,norm_root`` for the norm-power radius sequence."""
    return _write_csv(path, ("n", "norm_root"), ((n, float(v)) for n, v in enumerate(sequence, start=1)))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_SVG_SIZE = 600
_SVG_PAD = 30


class _Frame:
    """Affine map from the lambda plane onto SVG pixel coordinates."""

    def __init__(self, half: float, size: int = _SVG_SIZE) -> None:
        self.half = half
        self.size = size
        self.scale = (size - 2 * _SVG_PAD) / (2 * half)

    def x(self, value: float) -> float:
        return _SVG_PAD + (value + self.half) * self.scale

    def y(self, value: float) -> float:
        return _SVG_PAD + (self.half - value) * self.scale


def _circle(frame: _Frame, radius: float, stroke: str, dash: str = "") -> str:
    style = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<circle cx="{frame.x(0):.2f}" cy="{frame.y(0):.2f}" r="{radius * frame.scale:.2f}" '
        f'fill="none" stroke="{stroke}" stroke-width="1.5"{style}/>'
    )


def render_svg(
    spectrum: SpectrumSet,
    field: PseudospectrumField | None = None,
    level: float = 1e-2,
    title: str = "",
) -> str:
    """Spectrum outline with the unit circle, axes, and an optional sigma_min sublevel set.

    Grid cells of ``field`` with sigma_min at or below ``level`` are shaded.
    Sampled closures are drawn as a point cloud.
    """
    extent = max(spectrum.outer_radius, 1.0)
    if field is not None:
        g = field.grid
        extent = max(extent, abs(g.re_min), abs(g.re_max), abs(g.im_min), abs(g.im_max))
    frame = _Frame(1.05 * extent)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{frame.size}" height="{frame.size}" '
        f'viewBox="0 0 {frame.size} {frame.size}">',
        f'<rect width="{frame.size}" height="{frame.size}" fill="white"/>',
    ]

    if field is not None:
        g = field.grid
        dx = (g.re_max - g.re_min) / (g.width - 1) * frame.scale
        dy = (g.im_max - g.im_min) / (g.height - 1) * frame.scale
        pts = g.points()
        mask = field.values <= level
        for row, col in zip(*np.nonzero(mask), strict=True):
            p = pts[row, col]
            parts.append(
                f'<rect x="{frame.x(p.real) - dx / 2:.2f}" y="{frame.y(p.imag) - dy / 2:.2f}" '
                f'width="{dx:.2f}" height="{dy:.2f}" fill="#9ecae1" fill-opacity="0.6"/>'
            )

    axis = 'stroke="#bbbbbb" stroke-width="1"'
    parts.append(f'<line x1="{frame.x(-frame.half):.2f}" y1="{frame.y(0):.2f}" '
                 f'x2="{frame.x(frame.half):.2f}" y2="{frame.y(0):.2f}" {axis}/>')
    parts.append(f'<line x1="{frame.x(0):.2f}" y1="{frame.y(-frame.half):.2f}" '
                 f'x2="{frame.x(0):.2f}" y2="{frame.y(frame.half):.2f}" {axis}/>')
    parts.append(_circle(frame, 1.0, "#999999", "4 3"))

    params = spectrum.parameters
    if spectrum.shape in (SpectrumShape.DISK, SpectrumShape.CIRCLE):
        if spectrum.shape == SpectrumShape.DISK:
            parts.append(
                f'<circle cx="{frame.x(0):.2f}" cy="{frame.y(0):.2f}" r="{params["radius"] * frame.scale:.2f}" '
                'fill="#d62728" fill-opacity="0.12"/>'
            )
        parts.append(_circle(frame, params["radius"], "#d62728"))
    elif spectrum.shape == SpectrumShape.ANNULUS:
        parts.append(_circle(frame, params["r_min"], "#d62728"))
        parts.append(_circle(frame, params["r_max"], "#d62728"))
    elif spectrum.points is not None:
        for p in spectrum.points:
            if math.isfinite(p.real) and math.isfinite(p.imag):
                parts.append(f'<circle cx="{frame.x(p.real):.2f}" cy="{frame.y(p.imag):.2f}" r="0.8" fill="#d62728"/>')

    if title:
        parts.append(f'<text x="{_SVG_PAD}" y="{_SVG_PAD - 10}" font-family="sans-serif" font-size="14">{escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: Path, svg: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg, encoding="utf-8")
    return path
