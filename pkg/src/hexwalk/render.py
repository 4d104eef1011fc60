"""Deterministic SVG pictures of walks and domains."""

from __future__ import annotations

import io
import json
import math
from fractions import Fraction

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402

from .domains import Domain  # noqa: E402
from .hexlattice import LatticeError, Walk, check_mid, endpoints, is_mid, shared_vertex  # noqa: E402

SQRT3 = math.sqrt(3.0)


class RenderError(ValueError):
    pass


def to_plane(p) -> tuple[float, float]:
    """Grid point to Euclidean coordinates: (x/4, y*sqrt3/12)."""
    return p[0] / 4.0, p[1] * SQRT3 / 12.0


def read_walk_file(path) -> Walk:
    """JSON array of [xq, yq] pairs; errors carry the offending line number."""
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RenderError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(data, list) or not data:
        raise RenderError(f"{path}:1: expected a non-empty JSON array of [xq, yq] pairs")
    lines = _element_lines(text)
    pts = []
    for n, item in enumerate(data):
        line = lines[n] if n < len(lines) else 1
        if not (isinstance(item, list) and len(item) == 2 and all(isinstance(v, int) for v in item)):
            raise RenderError(f"{path}:{line}: element {n} is not an [xq, yq] integer pair")
        try:
            check_mid(item)
        except LatticeError as exc:
            raise RenderError(f"{path}:{line}: {exc}") from None
        pts.append(tuple(item))
    try:
        return Walk(pts)
    except LatticeError as exc:
        raise RenderError(f"{path}: {exc}") from None


def _element_lines(text: str) -> list[int]:
    """Line number of each top-level array element's opening bracket."""
    out = []
    depth = 0
    line = 1
    for ch in text:
        if ch == "\n":
            line += 1
        elif ch == "[":
            depth += 1
            if depth == 2:
                out.append(line)
        elif ch == "]":
            depth -= 1
    return out


def _rot_ccw(d, k):
    x, y = d
    for _ in range(k % 6):
        x, y = Fraction(x - y, 2), Fraction(3 * x + y, 2)
    return x, y


def _halfplanes(domain: Domain):
    """Each constraint as (A, B, C) with A*X + B*Y <= C in global grid coordinates."""
    out = []
    for con in domain.constraints:
        o = con.origin

        def val(p, con=con, o=o):
            X, Y = _rot_ccw((p[0] - o[0], p[1] - o[1]), con.turns)
            return con.a * X + con.b * Y - con.c

        v0 = val(o)
        A = val((o[0] + 1, o[1])) - v0
        B = val((o[0], o[1] + 1)) - v0
        out.append((A, B, -(v0 - A * o[0] - B * o[1])))
    return out


def _clip(poly, A, B, C):
    out = []
    n = len(poly)
    for j in range(n):
        p, q = poly[j], poly[(j + 1) % n]
        fp, fq = A * p[0] + B * p[1] - C, A * q[0] + B * q[1] - C
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = Fraction(fp) / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def domain_polygon(domain: Domain, box) -> list:
    """Exact corners (grid coordinates) of the domain clipped to box = (xmin, xmax, ymin, ymax)."""
    x0, x1, y0, y1 = box
    poly = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    for A, B, C in _halfplanes(domain):
        poly = _clip(poly, A, B, C)
        if not poly:
            break
    return poly


def walk_polyline(walk: Walk) -> list:
    pts = [tuple(walk[0])]
    for a, b in zip(walk.mids, walk.mids[1:]):
        pts.append(tuple(shared_vertex(a, b)))
        pts.append(tuple(b))
    return pts


def render_svg(walk: Walk | None = None, domain: Domain | None = None, scale: float = 1.0) -> str:
    """SVG text; identical inputs give byte-identical output."""
    if walk is None and domain is None:
        raise RenderError("nothing to draw")
    pts = walk_polyline(walk) if walk is not None else []
    if domain is not None and domain.bounded:
        ms = domain.mids()
    else:
        ms = []
    allpts = pts + [tuple(m) for m in ms] or [(0, 0)]
    xs = [p[0] for p in allpts]
    ys = [p[1] for p in allpts]
    pad = 6
    box = (min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)

    with matplotlib.rc_context({"svg.hashsalt": "hexwalk", "svg.fonttype": "none"}):
        w_in = max(2.0, (box[1] - box[0]) / 4.0 * scale)
        h_in = max(2.0, (box[3] - box[2]) * SQRT3 / 12.0 * scale)
        fig, ax = plt.subplots(figsize=(w_in, h_in))
        ax.set_aspect("equal")
        ax.axis("off")
        # lattice edges in the box
        for m in _box_mids(box):
            a, b = endpoints(m)
            (ax_, ay_), (bx_, by_) = to_plane(a), to_plane(b)
            ax.plot([ax_, bx_], [ay_, by_], color="#cccccc", lw=0.5)
        if domain is not None and domain.constraints:
            poly = domain_polygon(domain, box)
            if poly:
                P = [to_plane(p) for p in poly] + [to_plane(poly[0])]
                ax.plot([p[0] for p in P], [p[1] for p in P], color="#1f4e99", lw=1.2)
        if ms:
            ax.scatter(*zip(*[to_plane(m) for m in ms]), s=4, color="#1f4e99")
        if domain is not None and domain.vertex_set is not None:
            ax.scatter(*zip(*[to_plane(v) for v in sorted(domain.vertex_set)]), s=6, color="#1f4e99")
        if pts:
            P = [to_plane(p) for p in pts]
            if len(P) > 1:
                ax.plot([p[0] for p in P], [p[1] for p in P], color="#b22222", lw=1.5)
            ax.scatter([P[0][0]], [P[0][1]], s=30, color="#b22222", marker="o")
            ax.scatter([P[-1][0]], [P[-1][1]], s=30, color="#b22222", marker="s")
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def _box_mids(box):
    x0, x1, y0, y1 = (int(math.floor(box[0])), int(math.ceil(box[1])), int(math.floor(box[2])),
                      int(math.ceil(box[3])))
    return [(x, y) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1) if is_mid(x, y)]
