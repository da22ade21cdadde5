"""Deterministic SVG figures: ellipse matrices, log-determinant dot plots,
scree plots of log eigenvalues and a grid of eigenvalue size statistics.

All coordinates are written fixed-point with three decimals, so identical
inputs give byte-identical documents.  Elements carry ``class`` attributes
(``panel``, ``ellipse``, ``marker``, ``ci``, ``series``, with ``pooled``
added for the pooled matrix) so that figures can be inspected
programmatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import ValidationError

PALETTE = (
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a",
    "#66a61e", "#e6ab02", "#a6761d", "#1f78b4",
)
POOLED_COLOR = "#404040"
EIGSTAT_TITLES = ("log product", "sum", "precision", "max")
_EIGSTAT_FIELDS = ("log_product", "sum", "precision", "max")
_MIN_CELL = 130.0


@dataclass(frozen=True)
class FigureSpec:
    """Size, margins, axis policy and colours of a figure.

    ``x_range``/``y_range`` override the data-driven range of every panel.
    """

    width: float = 720.0
    height: float = 720.0
    margin: float = 40.0
    palette: tuple = PALETTE
    pooled_color: str = POOLED_COLOR
    pooled_opacity: float = 0.2
    pooled_emphasis: bool = True
    expand: float = 0.05
    x_range: tuple = None
    y_range: tuple = None
    title: str = ""
    font_size: float = 11.0
    panel_gap: float = 10.0
    panel_pad: tuple = field(default=(38.0, 8.0, 16.0, 30.0))  # left, right, top, bottom

    def __post_init__(self):
        if self.width <= 2 * self.margin or self.height <= 2 * self.margin:
            raise ValidationError("figure is too small for its margins")
        for r in (self.x_range, self.y_range):
            if r is not None and not r[1] > r[0]:
                raise ValidationError("axis ranges must be nonempty intervals")
        if not self.palette:
            raise ValidationError("palette must not be empty")

    def color(self, i):
        return self.palette[i % len(self.palette)]


def fmt(v):
    s = f"{float(v):.3f}"
    return "0.000" if s == "-0.000" else s


def _label(v):
    s = f"{float(v):.6g}"
    return "0" if s == "-0" else s


def nice_step(span, target=5):
    """Tick step from the 1-2-5 sequence giving about ``target`` intervals."""
    if not span > 0:
        return 1.0
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag * 1.0000001:
            return mult * mag
    return 10.0 * mag


def nice_ticks(lo, hi, target=5):
    step = nice_step(hi - lo, target)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while True:
        t = start + k * step
        if t > hi + 1e-9 * step:
            break
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        k += 1
    return ticks


def data_range(values, expand=0.05):
    """``[min, max]`` expanded by ``expand`` of the span on each side."""
    v = np.asarray([x for x in np.ravel(values) if np.isfinite(x)], dtype=float)
    if v.size == 0:
        return (0.0, 1.0)
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo
    if span <= 0:
        pad = abs(lo) * expand if lo != 0 else 1.0
        return (lo - pad, hi + pad)
    return (lo - expand * span, hi + expand * span)


class Svg:
    """Minimal SVG writer collecting element strings in document order."""

    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.parts = []

    def add(self, tag, text=None, **attrs):
        items = []
        for key, val in attrs.items():
            if val is None:
                continue
            name = key.rstrip("_").replace("_", "-")
            items.append(f" {name}={quoteattr(str(val))}")
        attr_str = "".join(items)
        if text is None:
            self.parts.append(f"<{tag}{attr_str}/>")
        else:
            self.parts.append(f"<{tag}{attr_str}>{escape(str(text))}</{tag}>")

    def open(self, tag, **attrs):
        self.add(tag, **attrs)
        self.parts[-1] = self.parts[-1][:-2] + ">"

    def close(self, tag):
        self.parts.append(f"</{tag}>")

    def tostring(self):
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{fmt(self.width)}" height="{fmt(self.height)}" '
            f'viewBox="0 0 {fmt(self.width)} {fmt(self.height)}">'
        )
        return head + "\n" + "\n".join(self.parts) + "\n</svg>\n"


@dataclass
class Panel:
    """A rectangular data area with linear scales."""

    x0: float
    y0: float
    x1: float
    y1: float
    xlim: tuple
    ylim: tuple

    def sx(self, v):
        lo, hi = self.xlim
        x = self.x0 + (np.asarray(v, dtype=float) - lo) / (hi - lo) * (self.x1 - self.x0)
        return np.clip(x, self.x0, self.x1)

    def sy(self, v):
        lo, hi = self.ylim
        y = self.y1 - (np.asarray(v, dtype=float) - lo) / (hi - lo) * (self.y1 - self.y0)
        return np.clip(y, self.y0, self.y1)


def _cells(spec, nrow, ncol, top_extra=0.0):
    """Grid of (x0, y0, x1, y1) data rectangles inside the margins."""
    m = spec.margin
    left, right, top, bottom = spec.panel_pad
    gx0, gy0 = m, m + top_extra
    cw = (spec.width - 2 * m - (ncol - 1) * spec.panel_gap) / ncol
    ch = (spec.height - 2 * m - top_extra - (nrow - 1) * spec.panel_gap) / nrow
    if cw <= left + right or ch <= top + bottom:
        raise ValidationError("figure too small for the requested panel grid")
    cells = {}
    for r in range(nrow):
        for c in range(ncol):
            x = gx0 + c * (cw + spec.panel_gap)
            y = gy0 + r * (ch + spec.panel_gap)
            cells[r, c] = (x + left, y + top, x + cw - right, y + ch - bottom)
    return cells


def _axes(svg, panel, spec, xlabel="", ylabel="", title="", yticks=True, xticks=True):
    fs = spec.font_size
    svg.add("rect", class_="frame", x=fmt(panel.x0), y=fmt(panel.y0),
            width=fmt(panel.x1 - panel.x0), height=fmt(panel.y1 - panel.y0),
            fill="none", stroke="#999999", stroke_width="0.5")
    if xticks:
        for t in nice_ticks(*panel.xlim):
            x = fmt(panel.sx(t))
            svg.add("line", class_="tick", x1=x, y1=fmt(panel.y1), x2=x, y2=fmt(panel.y1 + 3),
                    stroke="#666666", stroke_width="0.5")
            svg.add("text", _label(t), x=x, y=fmt(panel.y1 + 3 + fs), font_size=fmt(fs * 0.8),
                    text_anchor="middle")
    if yticks:
        for t in nice_ticks(*panel.ylim):
            y = fmt(panel.sy(t))
            svg.add("line", class_="tick", x1=fmt(panel.x0 - 3), y1=y, x2=fmt(panel.x0), y2=y,
                    stroke="#666666", stroke_width="0.5")
            svg.add("text", _label(t), x=fmt(panel.x0 - 5), y=fmt(panel.sy(t) + fs * 0.3),
                    font_size=fmt(fs * 0.8), text_anchor="end")
    if xlabel:
        svg.add("text", xlabel, class_="xlabel", x=fmt(0.5 * (panel.x0 + panel.x1)),
                y=fmt(panel.y1 + 3 + 2.1 * fs), font_size=fmt(fs), text_anchor="middle")
    if ylabel:
        cx, cy = panel.x0 - 5 - 2.6 * fs, 0.5 * (panel.y0 + panel.y1)
        svg.add("text", ylabel, class_="ylabel", x=fmt(cx), y=fmt(cy), font_size=fmt(fs),
                text_anchor="middle", transform=f"rotate(-90 {fmt(cx)} {fmt(cy)})")
    if title:
        svg.add("text", title, class_="title", x=fmt(0.5 * (panel.x0 + panel.x1)),
                y=fmt(panel.y0 - 4), font_size=fmt(fs), text_anchor="middle")


def _figure_title(svg, spec):
    if spec.title:
        svg.add("text", spec.title, class_="figure-title", x=fmt(spec.width / 2),
                y=fmt(spec.margin * 0.6), font_size=fmt(spec.font_size * 1.2),
                text_anchor="middle")


def _legend(svg, spec, labels, pooled_flags):
    fs = spec.font_size
    y = spec.height - spec.margin * 0.35
    x = spec.margin
    ci = 0
    for label, pooled in zip(labels, pooled_flags):
        color = spec.pooled_color if pooled else spec.color(ci)
        if not pooled:
            ci += 1
        svg.add("rect", class_="legend-key", x=fmt(x), y=fmt(y - fs * 0.8), width=fmt(fs * 0.8),
                height=fmt(fs * 0.8), fill=color)
        svg.add("text", label, class_="legend", x=fmt(x + fs), y=fmt(y), font_size=fmt(fs * 0.9))
        x += fs * (2.0 + 0.55 * len(label))


def _path(points):
    pts = [f"{fmt(x)},{fmt(y)}" for x, y in points]
    return "M " + " L ".join(pts) + " Z"


# ---------------------------------------------------------------------------
# ellipse matrix


def _layout_pairs(panels):
    idx = sorted({p.x_index for p in panels} | {p.y_index for p in panels})
    full = {(a, b) for i, a in enumerate(idx) for b in idx[i + 1:]}
    pairs = {(p.x_index, p.y_index) for p in panels}
    if len(idx) > 2 and pairs == full and len(pairs) == len(panels):
        # lower triangle: y variable picks the row, x variable the column
        pos = {v: i for i, v in enumerate(idx)}
        n = len(idx) - 1
        return n, n, [(pos[p.y_index] - 1, pos[p.x_index]) for p in panels]
    ncol = math.ceil(math.sqrt(len(panels)))
    nrow = math.ceil(len(panels) / ncol)
    return nrow, ncol, [divmod(i, ncol) for i in range(len(panels))]


def render_ellipse_matrix(panels, spec=None):
    """Pairwise data ellipses, one panel per variable pair.

    A complete set of pairs is laid out as a lower triangle; any other set as
    a near-square grid.  In each panel the pooled ellipse is drawn last,
    filled with the pooled tone.
    """
    panels = list(panels)
    if not panels:
        raise ValidationError("no panels to draw")
    n_ell = len(panels[0].ellipses)
    if n_ell < 1 or any(len(p.ellipses) != n_ell for p in panels):
        raise ValidationError("every panel needs the same ellipse set")
    nrow, ncol, where = _layout_pairs(panels)
    if spec is None:
        # default size grows with the grid so that panels stay legible
        m = FigureSpec.margin
        spec = FigureSpec(width=max(720.0, 2 * m + ncol * _MIN_CELL),
                          height=max(720.0, 2 * m + nrow * _MIN_CELL))
    svg = Svg(spec.width, spec.height)
    _figure_title(svg, spec)
    cells = _cells(spec, nrow, ncol)
    for pan, rc in zip(panels, where):
        x0, y0, x1, y1 = cells[rc]
        pts = np.vstack([e.boundary for e in pan.ellipses])
        xlim = spec.x_range or data_range(pts[:, 0], spec.expand)
        ylim = spec.y_range or data_range(pts[:, 1], spec.expand)
        P = Panel(x0, y0, x1, y1, tuple(xlim), tuple(ylim))
        svg.open("g", class_="panel", data_x=pan.x_name, data_y=pan.y_name)
        _axes(svg, P, spec, xlabel=pan.x_name, ylabel=pan.y_name)
        ordered = [e for e in pan.ellipses if not e.pooled] + [e for e in pan.ellipses if e.pooled]
        ci = 0
        for e in ordered:
            xy = zip(P.sx(e.boundary[:, 0]), P.sy(e.boundary[:, 1]))
            if e.pooled:
                emph = spec.pooled_emphasis
                svg.add("path", class_="ellipse pooled", d=_path(xy), fill=spec.pooled_color,
                        fill_opacity=fmt(spec.pooled_opacity) if emph else "0",
                        stroke=spec.pooled_color, stroke_width="2" if emph else "1",
                        data_label=e.label)
            else:
                svg.add("path", class_="ellipse", d=_path(xy), fill="none",
                        stroke=spec.color(ci), stroke_width="1.2", data_label=e.label)
                ci += 1
        svg.close("g")
    ells = panels[0].ellipses
    _legend(svg, spec, [e.label for e in ells], [e.pooled for e in ells])
    return svg.tostring()


# ---------------------------------------------------------------------------
# dot plots


def _dotplot(svg, spec, P, labels, values, pooled_flags, lower=None, upper=None, xlabel="",
             title=""):
    n = len(labels)
    _axes(svg, P, spec, xlabel=xlabel, title=title, yticks=False)
    fs = spec.font_size
    rows = np.arange(n)
    ys = P.sy(n - 1 - rows)  # first entry at the top
    ci = 0
    for i in range(n):
        y = fmt(ys[i])
        svg.add("text", labels[i], class_="category", x=fmt(P.x0 - 4), y=fmt(ys[i] + 0.3 * fs),
                font_size=fmt(fs * 0.8), text_anchor="end")
        color = spec.pooled_color if pooled_flags[i] else spec.color(ci)
        if not pooled_flags[i]:
            ci += 1
        cls = " pooled" if pooled_flags[i] else ""
        if lower is not None and np.isfinite(lower[i]) and np.isfinite(upper[i]):
            svg.add("line", class_="ci" + cls, x1=fmt(P.sx(lower[i])), y1=y,
                    x2=fmt(P.sx(upper[i])), y2=y, stroke=color,
                    stroke_width="3" if pooled_flags[i] else "1.5")
        x = fmt(P.sx(values[i]))
        if pooled_flags[i]:
            svg.add("circle", class_="marker pooled", cx=x, cy=y, r="5", fill=spec.pooled_color,
                    stroke="black", stroke_width="1", data_label=labels[i])
        else:
            svg.add("circle", class_="marker", cx=x, cy=y, r="4", fill=color,
                    data_label=labels[i])


def _category_panel(spec, x0, y0, x1, y1, n, xlim):
    # categories sit at integer positions 0..n-1; pad half a slot each side
    return Panel(x0, y0, x1, y1, tuple(xlim), (-0.5, n - 0.5))


def render_logdet_dotplot(r, spec=None):
    """Log-determinants of each group and the pooled matrix with intervals."""
    spec = spec or FigureSpec(width=560.0, height=360.0)
    entries = list(r.logdets)
    if len(entries) < 2:
        raise ValidationError("need group and pooled log-determinants")
    labels = [e.label for e in entries]
    vals = np.array([e.logdet for e in entries])
    lo = np.array([e.lower for e in entries])
    hi = np.array([e.upper for e in entries])
    pooled = [e.pooled for e in entries]
    xlim = spec.x_range or data_range(np.concatenate([vals, lo, hi]), spec.expand)
    svg = Svg(spec.width, spec.height)
    _figure_title(svg, spec)
    label_w = spec.font_size * 0.5 * max(len(s) for s in labels)
    (x0, y0, x1, y1), = _cells(spec, 1, 1).values()
    P = _category_panel(spec, x0 + label_w, y0, x1, y1, len(entries), xlim)
    svg.open("g", class_="panel")
    _dotplot(svg, spec, P, labels, vals, pooled, lo, hi, xlabel="log determinant")
    svg.close("g")
    return svg.tostring()


def render_eigstats_grid(stats, spec=None):
    """Two-by-two dot plots of log product, sum, precision and max eigenvalue."""
    spec = spec or FigureSpec(width=720.0, height=560.0)
    stats = list(stats)
    if not stats:
        raise ValidationError("no eigenvalue statistics to draw")
    for s in stats:
        for f in _EIGSTAT_FIELDS:
            if not np.isfinite(getattr(s, f, np.nan)):
                raise ValidationError(f"statistic {f!r} missing for {s.label!r}")
    labels = [s.label for s in stats]
    pooled = [s.pooled for s in stats]
    svg = Svg(spec.width, spec.height)
    _figure_title(svg, spec)
    cells = _cells(spec, 2, 2)
    label_w = spec.font_size * 0.5 * max(len(s) for s in labels)
    for k, (title, f) in enumerate(zip(EIGSTAT_TITLES, _EIGSTAT_FIELDS)):
        x0, y0, x1, y1 = cells[divmod(k, 2)]
        vals = np.array([getattr(s, f) for s in stats])
        xlim = spec.x_range or data_range(vals, spec.expand)
        P = _category_panel(spec, x0 + label_w, y0, x1, y1, len(stats), xlim)
        svg.open("g", class_="panel", data_stat=f)
        _dotplot(svg, spec, P, labels, vals, pooled, title=title)
        svg.close("g")
    return svg.tostring()


# ---------------------------------------------------------------------------
# scree


def render_scree(series, spec=None, panel_split=None):
    """Log-eigenvalue profiles against dimension, one polyline per matrix.

    ``panel_split=k`` draws dimensions ``1..k`` and ``k+1..p`` in two panels
    with separate vertical scales.  The pooled profile is drawn last with a
    heavier stroke and each of its points marked ``p``.
    """
    spec = spec or FigureSpec(width=720.0, height=400.0)
    series = list(series)
    if not series:
        raise ValidationError("no series to draw")
    lengths = {len(s.log_eigenvalues) for s in series}
    if len(lengths) != 1:
        raise ValidationError("all series must have the same length")
    p = lengths.pop()
    if panel_split is None:
        ranges = [(0, p)]
    else:
        if not 1 <= panel_split < p:
            raise ValidationError(f"panel_split must lie in 1..{p - 1}")
        ranges = [(0, panel_split), (panel_split, p)]
    svg = Svg(spec.width, spec.height)
    _figure_title(svg, spec)
    cells = _cells(spec, 1, len(ranges))
    order = [s for s in series if not s.pooled] + [s for s in series if s.pooled]
    colors = {}
    ci = 0
    for s in series:
        if not s.pooled:
            colors[id(s)] = spec.color(ci)
            ci += 1
    fs = spec.font_size
    for k, (a, b) in enumerate(ranges):
        x0, y0, x1, y1 = cells[0, k]
        dims = np.arange(a + 1, b + 1, dtype=float)
        vals = np.array([s.log_eigenvalues[a:b] for s in series])
        xlim = spec.x_range or (a + 0.5, b + 0.5)
        ylim = spec.y_range or data_range(vals, spec.expand)
        P = Panel(x0, y0, x1, y1, tuple(xlim), tuple(ylim))
        svg.open("g", class_="panel", data_dims=f"{a + 1}-{b}")
        _axes(svg, P, spec, xlabel="dimension", ylabel="log eigenvalue" if k == 0 else "")
        for s in order:
            xs = P.sx(dims)
            ys = P.sy(s.log_eigenvalues[a:b])
            pts = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in zip(xs, ys))
            if s.pooled:
                svg.add("polyline", class_="series pooled", points=pts, fill="none",
                        stroke=spec.pooled_color, stroke_width="3", data_label=s.label)
                for x, y in zip(xs, ys):
                    svg.add("text", "p", class_="pooled-mark", x=fmt(x), y=fmt(y + 0.35 * fs),
                            font_size=fmt(fs), font_weight="bold", text_anchor="middle",
                            fill=spec.pooled_color)
            else:
                svg.add("polyline", class_="series", points=pts, fill="none",
                        stroke=colors[id(s)], stroke_width="1.2", data_label=s.label)
        svg.close("g")
    _legend(svg, spec, [s.label for s in series], [s.pooled for s in series])
    return svg.tostring()
