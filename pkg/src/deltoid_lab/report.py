"""Verification report structure and deterministic emitters (JSON/CSV/SVG).

Every identity the laboratory certifies is registered as one entry with a
stable name, a machine-readable anchor naming the mathematical fact, a
status and free-form details.  Statuses:

    proven-exact             symbolic identity, zero tolerance
    proven-by-interpolation  exact at enough parameter values to pin the
                             polynomial identity for every parameter
    numeric-pass             numeric check within its stated tolerance
    numeric-fail             numeric check outside tolerance
    discrepancy-noted        a printed formula disagrees with the computed
                             resolution; both values attached

Emitters are deterministic: identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .models import z_of_theta

STATUSES = (
    "proven-exact",
    "proven-by-interpolation",
    "numeric-pass",
    "numeric-fail",
    "discrepancy-noted",
)


@dataclass(frozen=True)
class IdentityEntry:
    name: str
    anchor: str
    status: str
    details: str = ""

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")


@dataclass
class VerificationReport:
    config: dict
    entries: list[IdentityEntry] = field(default_factory=list)
    models: dict = field(default_factory=dict)  # name -> DiffusionModel JSON

    def add(self, name: str, anchor: str, status: str, details: str = "") -> IdentityEntry:
        if any(e.name == name for e in self.entries):
            raise ValueError(f"identity {name!r} registered twice")
        entry = IdentityEntry(name, anchor, status, details)
        self.entries.append(entry)
        return entry

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def failures(self) -> list[IdentityEntry]:
        return [e for e in self.entries if e.status == "numeric-fail"]

    def discrepancies(self) -> list[IdentityEntry]:
        return [e for e in self.entries if e.status == "discrepancy-noted"]

    def exit_code(self) -> int:
        # 0 all pass, 1 numeric failure, 2 exact-identity failure.
        if any(e.status == "numeric-fail" for e in self.entries):
            return 1
        return 0

    def to_jsonable(self) -> dict:
        return {
            "config": {k: str(v) for k, v in sorted(self.config.items())},
            "models": self.models,
            "entries": [
                {
                    "name": e.name,
                    "anchor": e.anchor,
                    "status": e.status,
                    "details": e.details,
                }
                for e in self.entries
            ],
            "summary": {
                "total": len(self.entries),
                "discrepancy-noted": len(self.discrepancies()),
                "numeric-fail": len(self.failures()),
            },
        }


def emit_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_report(report: VerificationReport, path: str) -> None:
    emit_json(report.to_jsonable(), path)


MARKOV_CSV_FIELDS = (
    "n", "k", "theta1", "theta2",
    "alpha", "beta", "gamma", "delta",
    "alpha_se", "beta_se", "gamma_se", "delta_se",
    "provenance",
)


def markov_matrices_to_csv(matrices) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=MARKOV_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for m in matrices:
        prov = "exact" if m.provenance["alpha"][0] == "exact" else "estimated"
        writer.writerow(
            {
                "n": m.n,
                "k": m.k,
                "theta1": f"{m.theta.t1:.12g}",
                "theta2": f"{m.theta.t2:.12g}",
                "alpha": f"{m.alpha:.12g}",
                "beta": f"{m.beta:.12g}",
                "gamma": f"{m.gamma:.12g}",
                "delta": f"{m.delta:.12g}",
                "alpha_se": f"{m.provenance['alpha'][1]:.6g}",
                "beta_se": f"{m.provenance['beta'][1]:.6g}",
                "gamma_se": f"{m.provenance['gamma'][1]:.6g}",
                "delta_se": f"{m.provenance['delta'][1]:.6g}",
                "provenance": prov,
            }
        )
    return buf.getvalue()


def markov_matrices_from_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for row in reader:
        out.append(
            {
                "n": int(row["n"]),
                "k": int(row["k"]),
                "theta": (float(row["theta1"]), float(row["theta2"])),
                "alpha": float(row["alpha"]),
                "beta": float(row["beta"]),
                "gamma": float(row["gamma"]),
                "delta": float(row["delta"]),
                "provenance": row["provenance"],
            }
        )
    return out


def emit_csv(text: str, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# SVG plots
# ---------------------------------------------------------------------------


def _svg_header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]


def _to_pixel(x: float, y: float, width: int, height: int, box=(-1.15, 1.15)) -> tuple[float, float]:
    lo, hi = box
    px = (x - lo) / (hi - lo) * width
    py = (1.0 - (y - lo) / (hi - lo)) * height
    return px, py


def deltoid_curve_points(samples: int = 720) -> list[tuple[float, float]]:
    """The boundary curve x(t) = (2 cos t + cos 2t)/3, y(t) = (2 sin t - sin 2t)/3."""
    out = []
    for i in range(samples):
        t = 2.0 * math.pi * i / samples
        out.append(
            (
                (2.0 * math.cos(t) + math.cos(2.0 * t)) / 3.0,
                (2.0 * math.sin(t) - math.sin(2.0 * t)) / 3.0,
            )
        )
    return out


def deltoid_svg(width: int = 480, height: int = 480, samples: int = 720) -> str:
    """Boundary curve with the three cusps 1, j, jbar marked."""
    lines = _svg_header(width, height)
    pts = deltoid_curve_points(samples)
    path = " ".join(
        f"{'M' if i == 0 else 'L'}{_to_pixel(x, y, width, height)[0]:.3f},{_to_pixel(x, y, width, height)[1]:.3f}"
        for i, (x, y) in enumerate(pts)
    )
    lines.append(f'<path d="{path} Z" fill="none" stroke="black" stroke-width="1.5"/>')
    for cx, cy in ((1.0, 0.0), (-0.5, math.sqrt(3.0) / 2.0), (-0.5, -math.sqrt(3.0) / 2.0)):
        px, py = _to_pixel(cx, cy, width, height)
        lines.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="4" fill="red"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def eigen_levels_svg(poly, grid_n: int = 120, width: int = 480, height: int = 480, bands: int = 12) -> str:
    """Level-set bands of |poly| over the domain, as colored cells."""
    from .models import deltoid_boundary_values

    lines = _svg_header(width, height)
    lo, hi = -1.15, 1.15
    xs = np.linspace(lo, hi, grid_n)
    ys = np.linspace(lo, hi, grid_n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    z = gx + 1j * gy
    inside = np.asarray(deltoid_boundary_values(z)) > 0.0
    vals = np.abs(poly.evaluate({"Z": z, "Zb": np.conj(z)}))
    vmax = float(vals[inside].max()) if inside.any() else 1.0
    cell_w = width / grid_n
    cell_h = height / grid_n
    for i in range(grid_n):
        for j in range(grid_n):
            if not inside[i, j]:
                continue
            level = min(bands - 1, int(vals[i, j] / vmax * bands))
            shade = 255 - int(level * 255 / max(bands - 1, 1))
            px, py = _to_pixel(xs[i], ys[j], width, height)
            lines.append(
                f'<rect x="{px - cell_w / 2:.2f}" y="{py - cell_h / 2:.2f}" '
                f'width="{cell_w:.2f}" height="{cell_h:.2f}" '
                f'fill="rgb({shade},{shade},255)"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def theta_coverage_svg(theta_per_axis: int = 120, width: int = 480, height: int = 480) -> str:
    """Image points Z(theta) of a uniform theta grid."""
    lines = _svg_header(width, height)
    ts = np.arange(theta_per_axis) * 2.0 * math.pi / theta_per_axis
    t1, t2 = np.meshgrid(ts, ts, indexing="ij")
    z = np.asarray(z_of_theta(t1, t2)).ravel()
    for zz in z:
        px, py = _to_pixel(zz.real, zz.imag, width, height)
        lines.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="0.8" fill="navy"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_svg(text: str, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
