"""Hexagonal lattice embedding on an exact integer grid.

Coordinates are integers (xq, yq) in units of 1/4 horizontally and sqrt(3)/12
vertically.  Edges have length sqrt(3)/3, the origin is the midpoint of a
vertical edge, and the two lattice vertices of that edge are (0, -2), (0, 2).

Grid rules (r an integer):

* vertical mid-edge:  yq = 6r,      xq = 2r (mod 4)
* slanted mid-edge:   yq = 6r + 3,  xq odd
* "up" vertex:        yq = 6r + 2,  xq = 2r (mod 4); mids at v+(0,-2), v+(1,1), v+(-1,1)
* "down" vertex:      yq = 6r + 4,  xq = 2r + 2 (mod 4); mids at v+(0,2), v+(1,-1), v+(-1,-1)

The parity coupling between xq and yq is what makes the hexagons tile: the
vertical edges of consecutive rows are offset by half a hexagon.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence


class LatticeError(ValueError):
    """Invalid coordinates or a violated walk contract."""


class MidEdge(NamedTuple):
    xq: int
    yq: int


class LatticeVertex(NamedTuple):
    xq: int
    yq: int


ORIGIN = MidEdge(0, 0)

_UP_OFFSETS = ((0, -2), (1, 1), (-1, 1))
_DOWN_OFFSETS = ((0, 2), (1, -1), (-1, -1))

# direction of (mid - vertex) as a power of zeta = exp(i pi/24); length sqrt(3)/6
DIRECTION_EXPONENT = {
    (0, -2): 36,
    (1, 1): 4,
    (-1, 1): 20,
    (0, 2): 12,
    (1, -1): 44,
    (-1, -1): 28,
}


def is_mid(xq: int, yq: int) -> bool:
    r, s = divmod(yq, 6)
    if s == 0:
        return (xq - 2 * r) % 4 == 0
    if s == 3:
        return xq % 2 == 1
    return False


def is_vertical(m) -> bool:
    return m[1] % 6 == 0


def vertex_kind(xq: int, yq: int) -> str | None:
    """'up', 'down', or None when (xq, yq) is not a lattice vertex."""
    r, s = divmod(yq, 6)
    if s == 2 and (xq - 2 * r) % 4 == 0:
        return "up"
    if s == 4 and (xq - 2 * r - 2) % 4 == 0:
        return "down"
    return None


def is_vertex(xq: int, yq: int) -> bool:
    return vertex_kind(xq, yq) is not None


def check_mid(m) -> MidEdge:
    try:
        x, y = int(m[0]), int(m[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise LatticeError(f"not a coordinate pair: {m!r}") from exc
    if len(m) != 2 or not is_mid(x, y):
        raise LatticeError(f"({m[0]}, {m[1]}) is not a mid-edge of the hexagonal lattice")
    return MidEdge(x, y)


def check_vertex(v) -> LatticeVertex:
    x, y = int(v[0]), int(v[1])
    if not is_vertex(x, y):
        raise LatticeError(f"({x}, {y}) is not a lattice vertex")
    return LatticeVertex(x, y)


def endpoints(m) -> tuple[LatticeVertex, LatticeVertex]:
    """The two lattice vertices of the edge carrying mid-edge m, sorted."""
    x, y = check_mid(m)
    if y % 6 == 0:
        return LatticeVertex(x, y - 2), LatticeVertex(x, y + 2)
    r = (y - 3) // 6
    if (x - 1 - 2 * r) % 4 == 0:
        # edge at 30 degrees
        a, b = LatticeVertex(x - 1, y - 1), LatticeVertex(x + 1, y + 1)
    else:
        a, b = LatticeVertex(x + 1, y - 1), LatticeVertex(x - 1, y + 1)
    return (a, b) if a < b else (b, a)


def vertex_mids(v) -> tuple[MidEdge, MidEdge, MidEdge]:
    """The three mid-edges around a lattice vertex, sorted."""
    x, y = int(v[0]), int(v[1])
    kind = vertex_kind(x, y)
    if kind is None:
        raise LatticeError(f"({x}, {y}) is not a lattice vertex")
    offs = _UP_OFFSETS if kind == "up" else _DOWN_OFFSETS
    return tuple(sorted(MidEdge(x + dx, y + dy) for dx, dy in offs))


def neighbors(m) -> list[tuple[MidEdge, LatticeVertex]]:
    """The four (mid-edge, shared vertex) pairs adjacent to m, sorted by mid."""
    m = check_mid(m)
    out = []
    for v in endpoints(m):
        for p in vertex_mids(v):
            if p != m:
                out.append((p, v))
    out.sort()
    return out


def shared_vertex(a, b) -> LatticeVertex | None:
    ea, eb = endpoints(a), endpoints(b)
    if a == b:
        return None
    for v in ea:
        if v in eb:
            return v
    return None


def direction_exponent(v, p) -> int:
    """d with p - v = (sqrt(3)/6) * zeta**d."""
    return DIRECTION_EXPONENT[(p[0] - v[0], p[1] - v[1])]


# -- exact embedding -------------------------------------------------------

class QSqrt3(NamedTuple):
    """The exact real number rat + irr*sqrt(3)."""

    rat: Fraction
    irr: Fraction

    def sign(self) -> int:
        a, b = self.rat, self.irr
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 3 b^2
        d = a * a - 3 * b * b
        return sa if d > 0 else (sb if d < 0 else 0)

    def __float__(self):
        return float(self.rat) + float(self.irr) * 3 ** 0.5

    def _cmp(self, other) -> int:
        return QSqrt3(self.rat - other.rat, self.irr - other.irr).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0


class ExactPoint(NamedTuple):
    """A point (x, y_sqrt3 * sqrt(3)) of the plane with rational x, y_sqrt3."""

    x: Fraction
    y_sqrt3: Fraction


def embed(m) -> ExactPoint:
    x, y = check_mid(m)
    return ExactPoint(Fraction(x, 4), Fraction(y, 12))


def embed_vertex(v) -> ExactPoint:
    x, y = check_vertex(v)
    return ExactPoint(Fraction(x, 4), Fraction(y, 12))


def squared_distance(p: ExactPoint, q: ExactPoint) -> Fraction:
    dx = p.x - q.x
    dy = p.y_sqrt3 - q.y_sqrt3
    return dx * dx + 3 * dy * dy


def grid_squared_norm(m) -> Fraction:
    """Squared Euclidean norm of a mid-edge, straight from grid coordinates."""
    return Fraction(3 * m[0] * m[0] + m[1] * m[1], 48)


SUPPORTED_ANGLES = ("0", "pi/2", "pi/6")


def project(p: ExactPoint, theta: str) -> QSqrt3:
    """Exact inner product of p with (cos theta, sin theta)."""
    if theta == "0":
        return QSqrt3(p.x, Fraction(0))
    if theta == "pi/2":
        return QSqrt3(Fraction(0), p.y_sqrt3)
    if theta == "pi/6":
        # x*sqrt3/2 + y_sqrt3*sqrt3/2
        return QSqrt3(Fraction(0), (p.x + p.y_sqrt3) / 2)
    raise LatticeError(f"unsupported projection angle {theta!r}; use one of {SUPPORTED_ANGLES}")


# -- turning ---------------------------------------------------------------

def step_turn(a, b) -> int:
    """Rotation sign (+1 counterclockwise) of the direction along the step a -> b.

    The walk enters the lattice vertex v shared by a and b along the edge of a
    and leaves along the edge of b; on the honeycomb that is always a turn by
    +-pi/3.
    """
    v = shared_vertex(a, b)
    if v is None:
        raise LatticeError(f"{tuple(a)} and {tuple(b)} are not adjacent")
    dx1, dy1 = v[0] - a[0], v[1] - a[1]
    dx2, dy2 = b[0] - v[0], b[1] - v[1]
    c = dx1 * dy2 - dy1 * dx2
    return 1 if c > 0 else -1


def turn_sign(a, b, c=None) -> int:
    """Turn sign of a walk segment.

    With two arguments this is the turn of the single step a -> b.  With three
    the segment a -> b -> c is checked (adjacency and passing through both
    endpoints of b's edge) and the turn of the step b -> c is returned.
    """
    if c is None:
        return step_turn(a, b)
    v1, v2 = shared_vertex(a, b), shared_vertex(b, c)
    if v1 is None or v2 is None:
        raise LatticeError("segment is not a chain of adjacent mid-edges")
    if v1 == v2 or a == c:
        raise LatticeError("segment backtracks through the same lattice vertex")
    return step_turn(b, c)


# -- walks -----------------------------------------------------------------

class Walk:
    """A self-avoiding walk on the mid-edge graph.

    Each mid-edge is visited once and the walk crosses every mid-edge from one
    endpoint of its edge to the other, so no lattice vertex is visited twice.
    """

    __slots__ = ("mids", "_winding")

    def __init__(self, mids: Iterable, validate: bool = True):
        self.mids = tuple(MidEdge(int(m[0]), int(m[1])) for m in mids)
        self._winding = None
        if not self.mids:
            raise LatticeError("a walk has at least one mid-edge")
        if validate:
            self.check()

    def check(self) -> None:
        ms = self.mids
        for m in ms:
            check_mid(m)
        if len(set(ms)) != len(ms):
            raise LatticeError("walk revisits a mid-edge")
        prev = None
        for i in range(len(ms) - 1):
            v = shared_vertex(ms[i], ms[i + 1])
            if v is None:
                raise LatticeError(f"steps {i} and {i + 1} are not adjacent")
            if prev is not None and v == prev:
                raise LatticeError(f"walk passes through {tuple(ms[i])} from the same endpoint twice")
            prev = v

    @classmethod
    def is_valid(cls, mids) -> bool:
        try:
            cls(mids)
        except LatticeError:
            return False
        return True

    @property
    def length(self) -> int:
        return len(self.mids) - 1

    def __len__(self):
        return len(self.mids)

    def __iter__(self):
        return iter(self.mids)

    def __getitem__(self, i):
        return self.mids[i]

    @property
    def start(self) -> MidEdge:
        return self.mids[0]

    @property
    def end(self) -> MidEdge:
        return self.mids[-1]

    def turns(self) -> list[int]:
        return [step_turn(self.mids[i], self.mids[i + 1]) for i in range(self.length)]

    def vertices(self) -> list[LatticeVertex]:
        return [shared_vertex(self.mids[i], self.mids[i + 1]) for i in range(self.length)]

    @property
    def winding(self) -> int:
        if self._winding is None:
            self._winding = sum(self.turns())
        return self._winding

    def reverse(self) -> "Walk":
        return Walk(self.mids[::-1], validate=False)

    def translate(self, d) -> "Walk":
        return Walk([(m[0] + d[0], m[1] + d[1]) for m in self.mids])

    def __eq__(self, other):
        return isinstance(other, Walk) and self.mids == other.mids

    def __hash__(self):
        return hash(self.mids)

    def __repr__(self):
        return f"Walk({[tuple(m) for m in self.mids]})"

    def to_json(self) -> str:
        return json.dumps([list(m) for m in self.mids])

    @classmethod
    def from_json(cls, text: str) -> "Walk":
        return cls(json.loads(text))


def winding(w: Walk | Sequence) -> int:
    """Total rotation of the walk in units of pi/3 (counterclockwise positive)."""
    if not isinstance(w, Walk):
        w = Walk(w)
    return w.winding


# -- symmetries ------------------------------------------------------------

def rotate_cw60(d) -> tuple[int, int]:
    """Rotate a grid vector by -pi/3."""
    x, y = d
    return ((x + y) // 2, (y - 3 * x) // 2)


def rotate_ccw60(d) -> tuple[int, int]:
    """Rotate a grid vector by +pi/3."""
    x, y = d
    return ((x - y) // 2, (3 * x + y) // 2)


def rotate_about(m, center, k: int):
    """Rotate a point by k*pi/3 around center (grid coordinates).

    Exact as long as m - center has coordinates of equal parity, which holds
    for differences of mid-edges, lattice vertices and hexagon centers.
    """
    d = (m[0] - center[0], m[1] - center[1])
    if (d[0] - d[1]) % 2:
        raise LatticeError("rotation leaves the grid")
    f = rotate_ccw60 if k % 6 <= 3 else rotate_cw60
    for _ in range(k % 6 if k % 6 <= 3 else 6 - k % 6):
        d = f(d)
    return (center[0] + d[0], center[1] + d[1])


def reflect_vertical_line(m, c: int):
    """Mirror across the line xq = c; a lattice symmetry when c is even."""
    return (2 * c - m[0], m[1])


HEXAGON_CENTER = (2, 0)
