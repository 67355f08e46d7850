"""Static SVG reports: dendrogram, per-cluster means, heatmaps and weekly box plots.

Output is plain SVG 1.1 with explicit fills and no external references.
Coordinates are printed with fixed precision and the plotted numbers are also
attached as ``data-*`` attributes written with ``repr``, so figures are
byte-stable and can be checked by parsing them back.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .core import Dendrogram, Partition, SeriesSet
from .errors import BadLength

FONT = "Helvetica, Arial, sans-serif"
LOW_RGB = (247, 251, 255)
HIGH_RGB = (8, 48, 107)
LINE_COLORS = ("#1f4e79", "#8c2d04", "#2d6a2d", "#5b2c6f", "#7f6000", "#0b5563", "#6b2737", "#3d3d3d")


def _f(v: float) -> str:
    return f"{v:.3f}"


def _attr_name(key: str) -> str:
    # class_ -> class, stroke_width -> stroke-width
    return key.rstrip("_").replace("_", "-")


class SvgDocument:
    def __init__(self, width: float, height: float, title: str = ""):
        self.width = width
        self.height = height
        self.parts: list[str] = []
        if title:
            self.parts.append(f"<title>{escape(title)}</title>")

    def add(self, tag: str, text: str | None = None, **attrs) -> None:
        items = []
        for key, value in attrs.items():
            if value is None:
                continue
            items.append(f"{_attr_name(key)}={quoteattr(value if isinstance(value, str) else _f(value))}")
        body = " ".join(items)
        if text is None:
            self.parts.append(f"<{tag} {body}/>")
        else:
            self.parts.append(f"<{tag} {body}>{escape(text)}</{tag}>")

    def open(self, tag: str = "g", **attrs) -> None:
        items = " ".join(f"{_attr_name(k)}={quoteattr(str(v))}" for k, v in attrs.items())
        self.parts.append(f"<{tag} {items}>" if items else f"<{tag}>")

    def close(self, tag: str = "g") -> None:
        self.parts.append(f"</{tag}>")

    def text(self, x, y, s, size=11, anchor="start", **attrs) -> None:
        self.add("text", s, x=x, y=y, font_size=str(size), font_family=FONT, text_anchor=anchor, **attrs)

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(self.width)}" '
            f'height="{_f(self.height)}" viewBox="0 0 {_f(self.width)} {_f(self.height)}">\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _emit(doc: SvgDocument, path) -> str:
    svg = doc.render()
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return svg


def figure_name(report: str, variable: str, k: int) -> str:
    return f"{report}_{variable}_{k}.svg"


def _values_attr(values) -> str:
    return " ".join(repr(float(v)) for v in values)


# --- dendrogram ------------------------------------------------------------

def cut_height(dend: Dendrogram, k: int) -> float | None:
    """A height strictly between the merges separating k-1 and k clusters."""
    h = dend.heights
    K = dend.leaf_count
    if k <= 1 or k > K:
        return None
    below = h[K - k - 1] if K - k - 1 >= 0 else 0.0
    return (below + h[K - k]) / 2


def render_dendrogram(dend: Dendrogram, path=None, *, cut_k: int | None = None, labels=None,
                      width: float = 800, height: float = 420) -> str:
    """Leaves along the x axis in drawing order, merge heights on the y axis."""
    K = dend.leaf_count
    left, right, top, bottom = 60.0, 20.0, 30.0, 70.0
    plot_w, plot_h = width - left - right, height - top - bottom
    hmax = float(dend.heights.max()) if K > 1 else 1.0
    hmax = hmax if hmax > 0 else 1.0
    order = dend.leaf_order()
    step = plot_w / K

    def y_of(h: float) -> float:
        return top + plot_h * (1.0 - h / hmax)

    xs: dict[int, float] = {}
    for pos, leaf in enumerate(order):
        xs[-(leaf + 1)] = left + step * (pos + 0.5)
    ys: dict[int, float] = {-(i + 1): y_of(0.0) for i in range(K)}

    doc = SvgDocument(width, height, "dendrogram")
    doc.add("rect", x=0, y=0, width=width, height=height, fill="#ffffff")
    doc.add("line", x1=left, y1=top, x2=left, y2=top + plot_h, stroke="#000000", stroke_width=1)
    for t in np.linspace(0, hmax, 5):
        doc.add("line", x1=left - 4, y1=y_of(t), x2=left, y2=y_of(t), stroke="#000000", stroke_width=1)
        doc.text(left - 6, y_of(t) + 4, f"{t:.3g}", size=10, anchor="end")
    doc.text(14, top + plot_h / 2, "height", size=11, anchor="middle",
             transform=f"rotate(-90 14 {_f(top + plot_h / 2)})")

    doc.open("g", id="merges", fill="none", stroke="#1f4e79", stroke_width="1.2")
    for m, mg in enumerate(dend.merges, start=1):
        xl, xr = xs[mg.left], xs[mg.right]
        yl, yr, ym = ys[mg.left], ys[mg.right], y_of(mg.height)
        d = f"M {_f(xl)} {_f(yl)} V {_f(ym)} H {_f(xr)} V {_f(yr)}"
        doc.add("path", d=d, data_merge=str(m), data_height=repr(mg.height), data_y=_f(ym))
        xs[m] = (xl + xr) / 2
        ys[m] = ym
    doc.close("g")

    if K <= 60:
        for pos, leaf in enumerate(order):
            name = str(labels[leaf]) if labels is not None else str(leaf + 1)
            x = left + step * (pos + 0.5)
            doc.text(x, top + plot_h + 12, name, size=9, anchor="end",
                     transform=f"rotate(-90 {_f(x)} {_f(top + plot_h + 12)})")

    if cut_k is not None:
        hc = cut_height(dend, cut_k)
        if hc is not None:
            doc.add("line", x1=left, y1=y_of(hc), x2=left + plot_w, y2=y_of(hc), stroke="#c00000",
                    stroke_width=1, stroke_dasharray="6 3", data_cut_k=str(cut_k), data_height=repr(float(hc)))
    return _emit(doc, path)


# --- cluster means ---------------------------------------------------------

def cluster_means(values: np.ndarray, p: Partition) -> np.ndarray:
    return np.vstack([values[p.members(c)].mean(axis=0) for c in range(1, p.k + 1)])


def render_cluster_means(s: SeriesSet, p: Partition, events=None, path=None, *,
                         panel_width: float = 260, panel_height: float = 160, columns: int = 4) -> str:
    """One panel per cluster with the pointwise mean and event delimiters."""
    values = s.values
    means = cluster_means(values, p)
    events = tuple(s.event_boundaries if events is None else events)
    N = s.length
    cols = min(columns, p.k)
    rows = -(-p.k // cols)
    pad = 36.0
    doc = SvgDocument(cols * panel_width, rows * panel_height, "cluster means")
    doc.add("rect", x=0, y=0, width=cols * panel_width, height=rows * panel_height, fill="#ffffff")
    ymax = float(means.max()) if means.size else 1.0
    ymin = min(0.0, float(means.min()))
    span = (ymax - ymin) or 1.0

    for c in range(1, p.k + 1):
        ox = ((c - 1) % cols) * panel_width
        oy = ((c - 1) // cols) * panel_height
        x0, y0 = ox + pad, oy + 20
        w, h = panel_width - pad - 10, panel_height - 20 - 24

        def px(t: float) -> float:
            return x0 + w * t / max(N - 1, 1)

        def py(v: float) -> float:
            return y0 + h * (1 - (v - ymin) / span)

        doc.open("g", class_="panel", data_cluster=c, data_size=int(p.sizes[c - 1]))
        doc.add("rect", x=x0, y=y0, width=w, height=h, fill="none", stroke="#808080", stroke_width=0.5)
        doc.text(x0, oy + 14, f"class {c} (n={p.sizes[c - 1]})", size=11)
        for e in events:
            doc.add("line", x1=px(e - 0.5), y1=y0, x2=px(e - 0.5), y2=y0 + h, stroke="#999999",
                    stroke_dasharray="3 3", stroke_width=1, class_="event", data_day=str(e))
        pts = " ".join(f"{_f(px(t))},{_f(py(v))}" for t, v in enumerate(means[c - 1]))
        doc.add("polyline", points=pts, fill="none", stroke=LINE_COLORS[(c - 1) % len(LINE_COLORS)],
                stroke_width=1.5, class_="mean", data_values=_values_attr(means[c - 1]))
        doc.text(x0 - 4, y0 + 4, f"{ymax:.3g}", size=9, anchor="end")
        doc.text(x0 - 4, y0 + h, f"{ymin:.3g}", size=9, anchor="end")
        doc.close("g")
    return _emit(doc, path)


# --- heatmaps --------------------------------------------------------------

def color_ramp(t: float) -> str:
    """Single-hue ramp from near-white (0) to dark blue (1)."""
    t = min(1.0, max(0.0, float(t)))
    rgb = [round(lo + (hi - lo) * t) for lo, hi in zip(LOW_RGB, HIGH_RGB)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def heatmap_row_order(p: Partition, cluster: int, dend: Dendrogram | None = None) -> list[int]:
    members = set(int(i) for i in p.members(cluster))
    order = dend.leaf_order() if dend is not None else range(len(p))
    return [i for i in order if i in members]


def render_cluster_heatmaps(s: SeriesSet, p: Partition, normalize_per_cluster: bool = True, path=None, *,
                            dendrogram: Dendrogram | None = None, events=None,
                            panel_width: float = 260, cell_height: float = 3.0) -> str:
    """One heatmap per cluster: rows are series, columns are days.

    Colors are min-max scaled within each cluster when
    ``normalize_per_cluster`` is set, over all series otherwise.  Rows follow
    the dendrogram leaf order when a dendrogram is given.
    """
    values = s.values
    N = s.length
    events = tuple(s.event_boundaries if events is None else events)
    gmin, gmax = float(values.min()), float(values.max())
    pad_top, pad_left = 22.0, 10.0
    heights = [pad_top + cell_height * int(n) + 12 for n in p.sizes]
    doc = SvgDocument(p.k * panel_width, max(heights), "cluster heatmaps")
    doc.add("rect", x=0, y=0, width=p.k * panel_width, height=max(heights), fill="#ffffff")
    cw = (panel_width - 2 * pad_left) / N

    for c in range(1, p.k + 1):
        rows = heatmap_row_order(p, c, dendrogram)
        block = values[rows]
        lo, hi = (float(block.min()), float(block.max())) if normalize_per_cluster else (gmin, gmax)
        span = hi - lo
        ox = (c - 1) * panel_width + pad_left
        doc.open("g", class_="heatmap", data_cluster=c, data_min=repr(lo), data_max=repr(hi))
        doc.text(ox, 14, f"class {c}", size=11)
        for r, i in enumerate(rows):
            doc.open("g", class_="row", data_subject=s[i].subject_id, data_index=i)
            for t in range(N):
                frac = (values[i, t] - lo) / span if span > 0 else 0.0
                doc.add("rect", x=ox + t * cw, y=pad_top + r * cell_height, width=cw, height=cell_height,
                        fill=color_ramp(frac))
            doc.close("g")
        for e in events:
            if 0 < e < N:
                doc.add("line", x1=ox + e * cw, y1=pad_top, x2=ox + e * cw, y2=pad_top + len(rows) * cell_height,
                        stroke="#c00000", stroke_width=0.8, class_="event", data_day=str(e))
        doc.close("g")
    return _emit(doc, path)


# --- weekly box plots ------------------------------------------------------

def box_stats(values) -> dict:
    """Quartiles by linear interpolation; whiskers reach the furthest points within 1.5 IQR."""
    v = np.sort(np.asarray(values, dtype=float))
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    return {
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
        "outliers": [float(x) for x in v[(v < lo_fence) | (v > hi_fence)]],
    }


def weekly_sums(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape[-1] % 7 != 0:
        raise BadLength(f"series length {values.shape[-1]} is not a whole number of weeks")
    return values.reshape(values.shape[0], -1, 7).sum(axis=2)


def render_weekly_boxplots(s: SeriesSet, p: Partition, path=None, *,
                           panel_width: float = 200, panel_height: float = 200) -> str:
    """Per cluster, one box per week of each player's weekly total."""
    sums = weekly_sums(s.values)
    n_weeks = sums.shape[1]
    doc = SvgDocument(p.k * panel_width, panel_height, "weekly box plots")
    doc.add("rect", x=0, y=0, width=p.k * panel_width, height=panel_height, fill="#ffffff")
    pad_left, pad_top, pad_bottom = 40.0, 22.0, 24.0
    h = panel_height - pad_top - pad_bottom

    for c in range(1, p.k + 1):
        block = sums[p.members(c)]
        ymax = float(block.max()) or 1.0
        ox = (c - 1) * panel_width
        w = panel_width - pad_left - 10
        bw = w / n_weeks

        def py(v: float) -> float:
            return pad_top + h * (1 - v / ymax)

        doc.open("g", class_="boxplot", data_cluster=c)
        doc.text(ox + pad_left, 14, f"class {c}", size=11)
        doc.add("line", x1=ox + pad_left, y1=pad_top, x2=ox + pad_left, y2=pad_top + h, stroke="#000000",
                stroke_width=0.8)
        doc.text(ox + pad_left - 4, pad_top + 4, f"{ymax:.3g}", size=9, anchor="end")
        doc.text(ox + pad_left - 4, pad_top + h, "0", size=9, anchor="end")
        for wk in range(n_weeks):
            st = box_stats(block[:, wk])
            cx = ox + pad_left + bw * (wk + 0.5)
            half = bw * 0.3
            doc.open("g", class_="box", data_week=wk + 1, data_q1=repr(st["q1"]), data_median=repr(st["median"]),
                     data_q3=repr(st["q3"]), data_whisker_low=repr(st["whisker_low"]),
                     data_whisker_high=repr(st["whisker_high"]))
            doc.add("line", x1=cx, y1=py(st["whisker_low"]), x2=cx, y2=py(st["whisker_high"]), stroke="#333333",
                    stroke_width=1)
            doc.add("rect", x=cx - half, y=py(st["q3"]), width=2 * half, height=py(st["q1"]) - py(st["q3"]),
                    fill="#c6dbef", stroke="#333333", stroke_width=1)
            doc.add("line", x1=cx - half, y1=py(st["median"]), x2=cx + half, y2=py(st["median"]),
                    stroke="#08306b", stroke_width=2)
            for o in st["outliers"]:
                doc.add("circle", cx=cx, cy=py(o), r=1.8, fill="none", stroke="#333333", stroke_width=0.8,
                        class_="outlier", data_value=repr(o))
            doc.text(cx, pad_top + h + 14, f"w{wk + 1}", size=9, anchor="middle")
            doc.close("g")
        doc.close("g")
    return _emit(doc, path)
