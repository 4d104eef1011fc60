"""Domains of the mid-edge graph.

Built-in families are intersections of closed half-planes whose boundary lines
sit on the integer grid.  A triangle family is described in its own local
frame, Tria_n = {Y >= 0, 3X + Y <= 6n, -3X + Y <= 6n}, and placed in the plane
by a translation and a rotation by a multiple of -pi/3; membership of a
mid-edge m is decided by pulling m back into the local frame.

Side labels follow the constraint that is tight.  A mid-edge on two sides gets
the label that comes first in ``SIDE_ORDER``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterator

from .hexlattice import (
    LatticeVertex,
    MidEdge,
    check_mid,
    endpoints,
    is_mid,
    is_vertex,
    neighbors,
    rotate_ccw60,
    vertex_mids,
)


class DomainError(ValueError):
    pass


SIDE_ORDER = ("RealAxis", "BottomSide", "RightSide", "LeftSide", "TopSide", "TopLine", "Generic")


def _side_rank(label: str) -> int:
    base = label.split("(")[0]
    return SIDE_ORDER.index(base) if base in SIDE_ORDER else len(SIDE_ORDER)


def _pull_back(m, origin, turns: int):
    """R^{-turns}(m - origin) where R is the rotation by -pi/3."""
    d = (m[0] - origin[0], m[1] - origin[1])
    for _ in range(turns % 6):
        d = rotate_ccw60(d)
    return d


@dataclass(frozen=True)
class Constraint:
    """a*X + b*Y <= c in a frame (origin, turns); label names the side."""

    label: str
    a: int
    b: int
    c: int
    origin: tuple[int, int] = (0, 0)
    turns: int = 0

    def value(self, m) -> int:
        X, Y = _pull_back(m, self.origin, self.turns)
        return self.a * X + self.b * Y - self.c


def _triangle_constraints(n: int, origin=(0, 0), turns=0, labels=("RealAxis", "RightSide", "LeftSide")):
    lo, right, left = labels
    return [
        Constraint(lo, 0, -1, 0, origin, turns),
        Constraint(right, 3, 1, 6 * n, origin, turns),
        Constraint(left, -3, 1, 6 * n, origin, turns),
    ]


@dataclass(frozen=True)
class Domain:
    kind: str
    params: tuple = ()
    constraints: tuple = field(default=(), repr=False, compare=False)
    bounded: bool = False
    # (center, radius^2 in the 3x^2+y^2 metric) enclosing a bounded domain
    extent: tuple | None = field(default=None, repr=False, compare=False)
    vertex_set: frozenset | None = field(default=None, repr=False, compare=False)

    # -- membership ------------------------------------------------------

    def contains(self, m) -> bool:
        if self.vertex_set is not None:
            return any(v in self.vertex_set for v in endpoints(m))
        for con in self.constraints:
            if con.value(m) > 0:
                return False
        return True

    def __contains__(self, m) -> bool:
        return self.contains(m)

    def sides_of(self, m) -> list[str]:
        """Labels of every defining line through m (m assumed inside)."""
        return [con.label for con in self.constraints if con.value(m) == 0]

    def side_label(self, m) -> str | None:
        labels = self.sides_of(m)
        if not labels:
            return None
        return min(labels, key=_side_rank)

    # -- listing ---------------------------------------------------------

    def mids_in_box(self, xmin: int, xmax: int, ymin: int, ymax: int) -> list[MidEdge]:
        out = []
        for y in range(ymin, ymax + 1):
            s = y % 6
            if s == 0:
                r = y // 6
                x0 = xmin + ((2 * r - xmin) % 4)
                step = 4
            elif s == 3:
                x0 = xmin if xmin % 2 else xmin + 1
                step = 2
            else:
                continue
            for x in range(x0, xmax + 1, step):
                m = MidEdge(x, y)
                if self.contains(m):
                    out.append(m)
        out.sort()
        return out

    def mids_in_ball(self, center, radius_sq: int) -> list[MidEdge]:
        """Mid-edges m in the domain with 3*dx^2 + dy^2 <= radius_sq."""
        cx, cy = center
        rx = isqrt(radius_sq // 3) + 1
        ry = isqrt(radius_sq) + 1
        return [
            m
            for m in self.mids_in_box(cx - rx, cx + rx, cy - ry, cy + ry)
            if 3 * (m[0] - cx) ** 2 + (m[1] - cy) ** 2 <= radius_sq
        ]

    def mids(self) -> list[MidEdge]:
        if not self.bounded:
            raise DomainError(f"{self.kind} is unbounded; use mids_in_box")
        if self.vertex_set is not None:
            out = set()
            for v in self.vertex_set:
                for p in vertex_mids(v):
                    out.add(p)
            return sorted(out)
        center, rsq = self.extent
        return self.mids_in_ball(center, rsq)

    def boundary_sides(self) -> dict[MidEdge, str]:
        if not self.bounded:
            raise DomainError("boundary_sides needs a bounded domain")
        if self.vertex_set is not None:
            return {m: "Generic" for m in self.boundary_mids()}
        out = {}
        for m in self.mids():
            lab = self.side_label(m)
            if lab is not None:
                out[m] = lab
        return out

    # -- combinatorial boundary ---------------------------------------------

    def vertices(self, mids=None) -> list:
        """V(Omega): lattice vertices whose three mid-edges all lie in the domain."""
        if self.vertex_set is not None:
            return sorted(self.vertex_set)
        ms = set(self.mids() if mids is None else mids)
        vs = set()
        for m in ms:
            for v in endpoints(m):
                if v not in vs and all(p in ms for p in vertex_mids(v)):
                    vs.add(v)
        return sorted(vs)

    def boundary_mids(self, mids=None) -> list[MidEdge]:
        """Mid-edges with exactly one endpoint in V(Omega)."""
        ms = self.mids() if mids is None else mids
        vs = set(self.vertices(ms))
        return sorted(m for m in ms if sum(v in vs for v in endpoints(m)) == 1)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "Explicit":
            return {"kind": "Explicit", "vertices": [list(v) for v in sorted(self.vertex_set)]}
        return {"kind": self.kind, "params": _jsonable(self.params)}

    def spec_key(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _jsonable(p):
    if isinstance(p, (tuple, list)):
        return [_jsonable(v) for v in p]
    if isinstance(p, Fraction):
        return str(p)
    return p


def from_json(data) -> Domain:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data["kind"]
    p = data.get("params", [])
    if kind == "Explicit":
        return explicit([tuple(v) for v in data["vertices"]])
    if kind == "Plane":
        return plane()
    if kind == "HalfPlane":
        return half_plane()
    if kind == "Strip":
        return strip(p[0])
    if kind == "Triangle":
        return triangle(p[0])
    if kind == "RotatedTriangle":
        return rotate_translate_triangle(p[0], tuple(p[1]))
    if kind == "Trapezoid":
        return trapezoid(p[0], tuple(p[1]))
    if kind == "OffsetTriangle":
        return offset_triangle(p[0], p[1])
    if kind == "SmallTriangleAt":
        return small_triangle_at(tuple(p[0]), Fraction(p[1]))
    raise DomainError(f"unknown domain kind {kind!r}")


# -- families ----------------------------------------------------------------

def plane() -> Domain:
    return Domain("Plane")


def half_plane() -> Domain:
    """U: the closed upper half-plane."""
    return Domain("HalfPlane", (), (Constraint("RealAxis", 0, -1, 0),))


def strip(k: int) -> Domain:
    """Strip_k: 0 <= y <= (sqrt 3/2) k."""
    if k < 0:
        raise DomainError("strip height must be nonnegative")
    cons = (Constraint("RealAxis", 0, -1, 0), Constraint(f"TopLine({k})", 0, 1, 6 * k))
    return Domain("Strip", (k,), cons)


def _triangle_extent(n: int, origin):
    # every corner of Tria_n is within 3X^2+Y^2 <= 36 n^2 of the local origin
    return (tuple(origin), 36 * n * n)


def triangle(k: int) -> Domain:
    """Tria_{2k+1}."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    n = 2 * k + 1
    return Domain("Triangle", (k,), tuple(_triangle_constraints(n)), True, _triangle_extent(n, (0, 0)))


def rotate_translate_triangle(i: int, x) -> Domain:
    """Tria_{2i+1,x} = x + e^{-i pi/3} Tria_{2i+1}."""
    x = check_mid(x)
    n = 2 * i + 1
    cons = _triangle_constraints(n, tuple(x), 1, ("LeftSide", "RightSide", "TopSide"))
    return Domain("RotatedTriangle", (i, tuple(x)), tuple(cons), True, _triangle_extent(n, x))


def trapezoid(i: int, x) -> Domain:
    """Trap_{2i+1,x} = Tria_{2i+1,x} intersected with the upper half-plane."""
    x = check_mid(x)
    n = 2 * i + 1
    cons = [Constraint("BottomSide", 0, -1, 0)]
    cons += _triangle_constraints(n, tuple(x), 1, ("LeftSide", "RightSide", "TopSide"))
    return Domain("Trapezoid", (i, tuple(x)), tuple(cons), True, _triangle_extent(n, x))


def offset_triangle(k: int, i: int) -> Domain:
    """T_{k,i}: Tria_{2k+1} cut by the renewal line of index i (kept on its left)."""
    if not 0 <= i <= k:
        raise DomainError("need 0 <= i <= k")
    n = 2 * k + 1
    cons = [
        Constraint("RealAxis", 0, -1, 0),
        Constraint("RightSide", 3, 1, 6 * (2 * i + 1)),
        Constraint("LeftSide", -3, 1, 6 * n),
    ]
    return Domain("OffsetTriangle", (k, i), tuple(cons), True, _triangle_extent(n, (0, 0)))


def small_triangle_at(y, r) -> Domain:
    """y + e^{4 pi i/3} Tria_{2r} for a half-integer r."""
    y = check_mid(y)
    r = Fraction(r)
    n = 2 * r
    if n.denominator != 1 or n < 0:
        raise DomainError("r must be a nonnegative half-integer")
    n = int(n)
    cons = _triangle_constraints(n, tuple(y), 2, ("LeftSide", "BottomSide", "RightSide"))
    return Domain("SmallTriangleAt", (tuple(y), r), tuple(cons), True, _triangle_extent(max(n, 1), y))


def explicit(vertex_set) -> Domain:
    vs = set()
    for v in vertex_set:
        x, y = int(v[0]), int(v[1])
        if not is_vertex(x, y):
            raise DomainError(f"({x}, {y}) is not a lattice vertex")
        vs.add((x, y))
    if not vs:
        raise DomainError("empty vertex set")
    return Domain("Explicit", (), (), True, None, frozenset(LatticeVertex(*v) for v in vs))


def load_vertex_file(path) -> Domain:
    """Explicit domain from a file of "x y" integer pairs, one per line."""
    verts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected two integers")
            try:
                verts.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
    return explicit(verts)


def is_simply_connected(d: Domain) -> bool:
    """Best-effort check: the domain's mids and a ring of outside mids are both connected."""
    inside = set(d.mids())
    if not inside:
        return False

    def connected(nodes):
        nodes = set(nodes)
        if not nodes:
            return True
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            m = stack.pop()
            for p, _ in neighbors(m):
                if p in nodes and p not in seen:
                    seen.add(p)
                    stack.append(p)
        return len(seen) == len(nodes)

    xs = [m[0] for m in inside]
    ys = [m[1] for m in inside]
    pad = 12
    box = [
        MidEdge(x, y)
        for y in range(min(ys) - pad, max(ys) + pad + 1)
        for x in range(min(xs) - pad, max(xs) + pad + 1)
        if is_mid(x, y)
    ]
    outside = [m for m in box if m not in inside]
    return connected(inside) and connected(outside)


def renewal_line_value(m, i: int) -> int:
    """Signed grid value of the renewal line i + 1/2 + e^{2 pi i/3} R at m (0 on the line)."""
    return 3 * m[0] + m[1] - 6 * (2 * i + 1)
