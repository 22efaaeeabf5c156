"""Parameter sweeps with log-log exponent fits, and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .construct import construct_elekes, construct_erdos, construct_general_alpha
from .errors import InvalidArgument
from .geom import AnalyzerConfig, GridSpec, grid_counts
from .structure import SlopeWindow, verify_lattice_structure

KINDS = ("general", "erdos", "elekes")
TARGETS = ("incidence", "rich_slopes", "family_size", "energy")
CSV_HEADER = ["n", "value", "log_n", "log_value"]


@dataclass
class SweepSpec:
    kind: str = "general"
    alpha: float = 0.4
    sizes: Sequence[int] = (2 ** 12, 2 ** 15, 2 ** 18)
    fit_target: str = "incidence"
    window: SlopeWindow = SlopeWindow()
    k: Fraction = Fraction(4)

    def validate(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown construction kind {self.kind!r}")
        if self.fit_target not in TARGETS:
            raise InvalidArgument(f"unknown fit target {self.fit_target!r}")
        if len(self.sizes) < 3:
            raise InvalidArgument("a fit needs at least 3 sizes")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise InvalidArgument("sizes must be strictly increasing")


@dataclass
class FitResult:
    exponent: float
    intercept: float
    r_squared: float
    points: list
    dropped: list = field(default_factory=list)


def fit_loglog(ns: Sequence[float], values: Sequence[float], min_r2: float = 0.95) -> FitResult:
    """Least squares of log(value) on log(n).

    When r^2 < min_r2 and more than three points are present, the smallest n is
    dropped once and the fit repeated.
    """
    if len(ns) != len(values) or len(ns) < 2 or any(v <= 0 for v in list(ns) + list(values)):
        raise InvalidArgument("fit needs >= 2 points with positive values")
    pts = [(math.log(n), math.log(v)) for n, v in zip(ns, values)]

    def _fit(p):
        x = np.array([a for a, _ in p])
        y = np.array([b for _, b in p])
        slope, icept = np.polyfit(x, y, 1)
        resid = y - (slope * x + icept)
        ss_tot = float(((y - y.mean()) ** 2).sum())
        r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
        return float(slope), float(icept), min(max(r2, 0.0), 1.0)

    slope, icept, r2 = _fit(pts)
    dropped = []
    if r2 < min_r2 and len(pts) > 3:
        dropped = [pts[0]]
        slope, icept, r2 = _fit(pts[1:])
    return FitResult(slope, icept, r2, [list(p) for p in pts], [list(p) for p in dropped])


def build_configuration(kind: str, N: int, alpha: float = 0.4, window: SlopeWindow = SlopeWindow(),
                        k=Fraction(4), n_lines: int | None = None):
    """(grid, lines, manifest) for a sweep point of nominal size N."""
    if kind == "general":
        g = GridSpec.from_alpha(N, alpha)
        _, L, man = construct_general_alpha(g, window, k, g.N if n_lines is None else n_lines)
    elif kind == "erdos":
        m = max(2, math.isqrt(N))
        g = GridSpec(m, m)
        _, L, man = construct_erdos(m, g.N if n_lines is None else n_lines, window, k)
    elif kind == "elekes":
        r = max(1, round(N ** (1 / 3)))
        _, L, man = construct_elekes(r)
        g = GridSpec(r, 2 * r * r)
    else:
        raise InvalidArgument(f"unknown construction kind {kind!r}")
    return g, L, man


def sweep_point(spec: SweepSpec, N: int) -> dict:
    g, L, man = build_configuration(spec.kind, N, spec.alpha, spec.window, spec.k)
    counts = grid_counts(g, L)
    row = {"n": N, "grid": [g.w, g.h], "N": g.N, "lines": len(L), "manifest_sha256": man.lines_sha256,
           "manifest": json.loads(man.to_json()), "incidences": int(counts.sum())}
    if spec.kind != "elekes":
        rep = verify_lattice_structure(g, L, AnalyzerConfig(k=spec.k), spec.window,
                                       counts=counts, concurrency="lattice-points")
        row["report"] = rep.to_dict()
    return row


def _target_value(row: dict, target: str) -> float:
    if target == "incidence":
        return row["incidences"]
    rep = row.get("report")
    if rep is None:
        raise InvalidArgument(f"target {target!r} needs a lattice analysis")
    return {"rich_slopes": rep["rich_slopes"], "family_size": rep["median_family_size"],
            "energy": rep["slope_mult_energy"]}[target]


def run_sweep(spec: SweepSpec, threads: int = 1) -> tuple[FitResult, list[dict]]:
    """Construct, count and analyze at every size, then fit the chosen exponent."""
    spec.validate()
    rows = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        futures = [(N, pool.submit(sweep_point, spec, N)) for N in spec.sizes]
        for N, fut in futures:
            try:
                rows.append(fut.result())
            except Exception as exc:
                raise type(exc)(f"sweep failed at N={N}: {exc}") from exc
    ns = [row["N"] for row in rows]
    fit = fit_loglog(ns, [_target_value(r, spec.fit_target) for r in rows])
    for row in rows:
        row["value"] = _target_value(row, spec.fit_target)
    return fit, rows


# -- reports ------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def emit_report(report, fmt: str = "json") -> bytes:
    """Deterministic serialization: sorted-key JSON, fixed-header CSV, or a log-log SVG.

    CSV and SVG take a FitResult (or a dict with a "points" list).
    """
    if fmt == "json":
        if hasattr(report, "__dataclass_fields__"):
            report = asdict(report)
        return (json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n").encode()
    points = report.points if isinstance(report, FitResult) else report["points"]
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_HEADER)
        for lx, ly in points:
            wr.writerow([round(math.exp(lx)), repr(math.exp(ly)), repr(lx), repr(ly)])
        return buf.getvalue().encode()
    if fmt == "svg-loglog":
        return _svg_loglog(report if isinstance(report, FitResult) else FitResult(
            report["exponent"], report["intercept"], report["r_squared"], points)).encode()
    raise InvalidArgument(f"unknown report format {fmt!r}")


def _svg_loglog(fit: FitResult, width: int = 480, height: int = 360, pad: int = 40) -> str:
    xs = [p[0] for p in fit.points]
    ys = [p[1] for p in fit.points]
    x0, x1 = min(xs), max(xs)
    fy = [fit.exponent * x + fit.intercept for x in (x0, x1)]
    y0, y1 = min(ys + fy), max(ys + fy)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def py(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<line class="fit" x1="{px(xs[0]):.2f}" y1="{py(fy[0]):.2f}" x2="{px(max(xs)):.2f}" '
           f'y2="{py(fy[1]):.2f}" stroke="red"/>']
    for x, y in fit.points:
        out.append(f'<circle class="point" cx="{px(x):.2f}" cy="{py(y):.2f}" r="4" fill="blue"/>')
    out.append(f'<text x="{pad}" y="{pad - 12}" font-size="12">slope {fit.exponent:.4f}, '
               f'r^2 {fit.r_squared:.4f}</text>')
    out.append(f'<text x="{width // 2}" y="{height - 8}" font-size="12">log N</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
