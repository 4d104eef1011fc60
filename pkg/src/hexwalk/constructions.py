"""Walk surgery: renewal times, unfolding, bridge decomposition, triangle gluing."""

from __future__ import annotations

import csv
import io
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import log

from .domains import (
    Domain,
    renewal_line_value,
    small_triangle_at,
    strip,
    trapezoid,
    triangle,
)
from .enumerator import ResourceError, walks_in
from .domains import plane
from .hexlattice import (
    LatticeError,
    MidEdge,
    Walk,
    embed,
    grid_squared_norm,
    neighbors,
    project,
    reflect_vertical_line,
    shared_vertex,
)

ORIGIN = MidEdge(0, 0)
DISPLACEMENT_CAP = 14


class ConstructionError(ValueError):
    """A precondition of a construction failed; ``constraint`` names which."""

    constraint = "contract"


class EndpointMismatch(ConstructionError):
    constraint = "endpoint"


class SelfIntersection(ConstructionError):
    constraint = "self-avoidance"


class HalfPlaneViolation(ConstructionError):
    constraint = "half-plane"


class DomainViolation(ConstructionError):
    constraint = "domain"


class ParameterError(ConstructionError):
    constraint = "parameters"


def _as_walk(w) -> Walk:
    return w if isinstance(w, Walk) else Walk(w)


# -- renewal times ------------------------------------------------------------------

@dataclass(frozen=True)
class RenewalProfile:
    walk: Walk
    k: int
    indices: tuple
    N: int

    def to_json(self) -> dict:
        return {"walk": [list(m) for m in self.walk], "k": self.k, "renewals": list(self.indices), "N": self.N}


def renewal_times(walk, k: int) -> RenewalProfile:
    """Indices i in [0, k] whose renewal line the walk crosses exactly once.

    The lines meet the lattice only at mid-edges of one slanted class and
    every such mid-edge is a transversal crossing, so counting visits to the
    line is the same as counting crossings.
    """
    w = _as_walk(walk)
    d = triangle(k)
    if w.start != ORIGIN:
        raise ConstructionError("a triangle walk starts at the origin")
    for m in w:
        if not d.contains(m):
            raise DomainViolation(f"{tuple(m)} is outside Tria_{2 * k + 1}")
    counts = Counter()
    for m in w:
        for i in range(k + 1):
            if renewal_line_value(m, i) == 0:
                counts[i] += 1
    idx = tuple(i for i in range(k + 1) if counts[i] == 1)
    return RenewalProfile(w, k, idx, len(idx))


def polyline(walk) -> list:
    """Grid points of the embedded walk: mid-edges with the shared vertices between them."""
    w = _as_walk(walk)
    pts = [tuple(w[0])]
    for a, b in zip(w.mids, w.mids[1:]):
        pts.append(tuple(shared_vertex(a, b)))
        pts.append(tuple(b))
    return pts


def crossing_events(walk, i: int) -> int:
    """Maximal runs of polyline segments lying on or crossing renewal line i."""
    pts = polyline(walk)
    f = [3 * x + y - 6 * (2 * i + 1) for x, y in pts]
    if len(pts) == 1:
        return int(f[0] == 0)
    runs = 0
    inside = False
    for a, b in zip(f, f[1:]):
        hit = min(a, b) <= 0 <= max(a, b)
        if hit and not inside:
            runs += 1
        inside = hit
    return runs


# -- bridges and unfolding ------------------------------------------------------------

def is_bridge(walk, translated: bool = True) -> bool:
    """A walk from the bottom line of Strip_k to its top line inside the strip.

    With ``translated`` the walk is first moved so that it starts at the
    origin; the start must then be a vertical mid-edge on a row.
    """
    w = _as_walk(walk)
    s = w.start
    if translated:
        if s[1] % 6:
            return False
        w = Walk([(m[0] - s[0], m[1] - s[1]) for m in w], validate=False)
    elif s != ORIGIN:
        return False
    if w.start != ORIGIN:
        return False
    e = w.end
    if e[1] < 0 or e[1] % 6:
        return False
    d = strip(e[1] // 6)
    return all(d.contains(m) for m in w)


def is_horizontal_bridge(walk) -> bool:
    """X(start) <= X(t) <= X(end) for every step t."""
    w = _as_walk(walk)
    x0, x1 = w.start[0], w.end[0]
    return all(x0 <= m[0] <= x1 for m in w)


def _unfold_from_min(ms: list) -> list:
    """Unfold a walk whose first mid-edge has minimal X into a horizontal bridge."""
    ms = list(ms)
    while True:
        top = max(m[0] for m in ms)
        t = max(j for j, m in enumerate(ms) if m[0] == top)
        if t == len(ms) - 1:
            return ms
        # an interior point of maximal X is a vertical mid-edge, so X = top is even
        if top % 2:
            raise LatticeError("interior maximum on a slanted mid-edge")
        ms = ms[: t + 1] + [MidEdge(*reflect_vertical_line(m, top)) for m in ms[t + 1:]]


def hw_unfold(walk) -> Walk:
    """Hammersley-Welsh unfolding in the horizontal direction.

    The suffix after the last point of maximal X is mirrored in the vertical
    line through that point until the walk ends at its maximum; the part
    before the first point of minimal X is treated the same way after
    reversal and mirrored to the left.  The result starts at the origin.
    """
    w = _as_walk(walk)
    ms = list(w.mids)
    lo = min(m[0] for m in ms)
    j = min(i for i, m in enumerate(ms) if m[0] == lo)
    suffix = _unfold_from_min(ms[j:])
    if j == 0:
        out = suffix
    else:
        q = _unfold_from_min(ms[j::-1])
        c = lo if lo % 2 == 0 else lo - 1
        if c != lo and j != len(ms) - 1:
            raise LatticeError("interior minimum on a slanted mid-edge")
        left = [MidEdge(*reflect_vertical_line(m, c)) for m in q][::-1]
        out = left + suffix[1:]
    s = out[0]
    out = Walk([(m[0] - s[0], m[1] - s[1]) for m in out])
    return out


def max_projection(walk, theta: str):
    w = _as_walk(walk)
    return max(project(embed(m), theta) for m in w)


# -- bridge decomposition ---------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionRecord:
    i0: int
    alpha: Walk
    tau: Walk
    b_pieces: tuple
    c_pieces: tuple
    I: tuple
    m: int
    s: int
    w: int
    n: int
    sums: tuple = field(default=())  # sum_j I(i, j) for every i

    def reconstruct(self) -> Walk:
        return reconstruct(self)

    def to_json(self) -> dict:
        def wj(x):
            return [list(p) for p in x]

        return {
            "i0": self.i0,
            "m": self.m,
            "s": self.s,
            "w": self.w,
            "n": self.n,
            "alpha": wj(self.alpha),
            "tau": wj(self.tau),
            "b": [wj(b) for b in self.b_pieces],
            "c": [wj(c) for c in self.c_pieces],
            "I": list(self.I),
            "sums": list(self.sums),
        }


def _line_times(rows, h: int, after: int):
    """(t-, t+) for line h: first visit at or after ``after`` and last visit."""
    tp = max(t for t, r in enumerate(rows) if r == h)
    tm = min(t for t, r in enumerate(rows) if r == h and t >= after)
    return tm, tp


def bridge_decompose(bridge, n: int | None = None, m: int = 1) -> DecompositionRecord:
    w = _as_walk(bridge)
    if not is_bridge(w, translated=False):
        raise ConstructionError("input is not a bridge from the origin")
    if n is None:
        n = w.length
    if n != w.length:
        raise ConstructionError(f"walk has length {w.length}, not {n}")
    if m < 1:
        raise ConstructionError("m must be positive")
    height = w.end[1] // 6
    if height < m:
        raise ConstructionError(f"bridge height {height} is below m = {m}")
    s = height // m - 1
    rows = [p[1] // 6 if p[1] % 6 == 0 else None for p in w]
    best = None
    sums = []
    for i in range(m):
        tps, tms, I = [], [], []
        after = 0
        for j in range(s + 1):
            h = j * m + i
            tm, tp = _line_times(rows, h, after)
            tms.append(tm)
            tps.append(tp)
            I.append(sum(1 for t in range(tm, tp + 1) if rows[t] == h))
            after = tp
        total = sum(I)
        sums.append(total)
        if best is None or total < best[0]:
            best = (total, i, tms, tps, I)
    _, i0, tms, tps, I = best
    ms = w.mids

    def piece(a, b):
        return Walk(ms[a:b + 1], validate=False)

    alpha = piece(0, tms[0])
    cs = tuple(piece(tms[j], tps[j]) for j in range(s + 1))
    bs = tuple(piece(tps[j], tms[j + 1]) for j in range(s))
    tau = piece(tps[s], n)
    return DecompositionRecord(i0, alpha, tau, bs, cs, tuple(I), m, s, height, n, tuple(sums))


def reconstruct(rec: DecompositionRecord) -> Walk:
    out = list(rec.alpha.mids)
    for j, c in enumerate(rec.c_pieces):
        out.extend(c.mids[1:])
        nxt = rec.b_pieces[j] if j < len(rec.b_pieces) else rec.tau
        out.extend(nxt.mids[1:])
    return Walk(out)


# -- triangle concatenation --------------------------------------------------------------

@dataclass(frozen=True)
class GluedWalk:
    walk: Walk
    k_end: int  # the walk ends at the mid-edge (4 k_end, 0)
    bound: Fraction | None  # 2T + l + 2r when three pieces are glued


def bottom_length(i: int, x) -> Fraction:
    """Length of the bottom side of Trap_{2i+1,x}, with (4, 0) at distance 1."""
    n = 2 * i + 1
    return Fraction(n, 2) - Fraction(x[1], 6)


def _inside(w: Walk, d: Domain, what: str):
    for p in w:
        if not d.contains(p):
            raise DomainViolation(f"{what} leaves its domain at {tuple(p)}")


def gm_concatenate(g1, g2, g3=None, *, T: int, k: int, i: int, check_ranges: bool = True) -> GluedWalk:
    """Glue a triangle walk, a trapezoid walk and optionally a small-triangle walk.

    Every piece is checked against its domain, the result against the walk
    invariants, the upper half-plane and the real axis; the first violation
    raises a ConstructionError subclass naming it.
    """
    g1, g2 = _as_walk(g1), _as_walk(g2)
    if check_ranges and not (T <= k <= 2 * T - 1 and 4 * T <= i <= 5 * T - 1):
        raise ParameterError(f"need T <= k <= 2T-1 and 4T <= i <= 5T-1 (T={T}, k={k}, i={i})")
    if g1.start != ORIGIN:
        raise EndpointMismatch("the first walk must start at the origin")
    _inside(g1, triangle(k), "first walk")
    x = g1.end
    if g2.start != x:
        raise EndpointMismatch(f"second walk starts at {tuple(g2.start)}, first ends at {tuple(x)}")
    if x[1] > 0:
        _inside(g2, trapezoid(i, x), "second walk")
    elif g2.length:
        raise DomainViolation("no trapezoid hangs below a point of the real axis")
    seq = list(g1.mids) + list(g2.mids[1:])
    bound = None
    if g3 is not None:
        g3 = _as_walk(g3)
        y = g2.end
        if g3.start != y:
            raise EndpointMismatch(f"third walk starts at {tuple(g3.start)}, second ends at {tuple(y)}")
        r = Fraction(y[1], 6)
        _inside(g3, small_triangle_at(y, r), "third walk")
        seq += list(g3.mids[1:])
        bound = 2 * T + bottom_length(i, x) + 2 * r
    if len(set(seq)) != len(seq):
        raise SelfIntersection("the pieces share a mid-edge")
    try:
        out = Walk(seq)
    except LatticeError as exc:
        raise SelfIntersection(str(exc)) from None
    for p in out:
        if p[1] < 0:
            raise HalfPlaneViolation(f"{tuple(p)} is below the real axis")
    if out.end[1] != 0:
        raise EndpointMismatch("the glued walk does not end on the real axis")
    k_end = out.end[0] // 4
    if bound is not None and Fraction(abs(out.end[0]), 4) > bound:
        raise ConstructionError(f"endpoint distance exceeds 2T + l + 2r = {bound}")
    return GluedWalk(out, k_end, bound)


def random_walk_to(domain: Domain, start, target, rng: random.Random, node_budget: int = 200_000):
    """A random SAW in the domain from start to a mid-edge with target(m) true.

    Randomised depth-first search, so a walk is found whenever one exists
    within the node budget; the distribution is not uniform.
    """
    start = MidEdge(*start)
    if target(start):
        return Walk([start])
    inside = domain.contains
    if domain.bounded:
        allowed = frozenset(domain.mids())
        inside = allowed.__contains__
    path = [start]
    ent = [None]  # endpoint through which each mid-edge was entered
    on = {start}

    def reaches(p, v):
        # breadth-first search over unvisited mid-edges, leaving p away from v
        seen = {p}
        frontier = [(p, v)]
        while frontier:
            nxt = []
            for q, e in frontier:
                if target(q):
                    return True
                for r, u in neighbors(q):
                    if u != e and r not in seen and r not in on and inside(r):
                        seen.add(r)
                        nxt.append((r, u))
            frontier = nxt
        return False

    def options(m, e):
        opts = [(p, v) for p, v in neighbors(m)
                if v != e and p not in on and inside(p) and reaches(p, v)]
        rng.shuffle(opts)
        return opts

    choices = [options(start, None)]
    nodes = 0
    while path:
        nodes += 1
        if nodes > node_budget:
            raise ResourceError("random walk search exceeded its node budget")
        if not choices[-1]:
            on.discard(path.pop())
            ent.pop()
            choices.pop()
            continue
        p, v = choices[-1].pop()
        path.append(p)
        on.add(p)
        ent.append(v)
        if target(p):
            return Walk(path)
        choices.append(options(p, v))
    return None


def right_side_walks(k: int) -> list[Walk]:
    d = triangle(k)
    L = len(d.mids()) - 1
    return [w for w in walks_in(d, ORIGIN, L) if d.side_label(w.end) == "RightSide"]


def random_admissible_triple(T: int, rng: random.Random, k: int | None = None, i: int | None = None,
                             pool: list | None = None):
    """(g1, g2, g3, k, i): g1 ends on the right side of Tria_{2k+1}, g2 crosses
    Trap_{2i+1,x} to its right side, g3 descends in the small triangle to the axis."""
    k = rng.randint(T, 2 * T - 1) if k is None else k
    i = rng.randint(4 * T, 5 * T - 1) if i is None else i
    g1 = rng.choice(pool if pool is not None else right_side_walks(k))
    x = g1.end
    trap = trapezoid(i, x)
    g2 = random_walk_to(trap, x, lambda m: m != x and trap.side_label(m) == "RightSide", rng)
    y = g2.end
    small = small_triangle_at(y, Fraction(y[1], 6))
    g3 = random_walk_to(small, y, lambda m: m[1] == 0, rng)
    return g1, g2, g3, k, i


def count_splittings(walk, T: int, ks, i_range, ending: str = "BottomSide") -> int:
    """Ways to cut a U-walk into a right-ending triangle walk and a trapezoid walk."""
    w = _as_walk(walk)
    ms = w.mids
    total = 0
    for k in ks:
        tri = triangle(k)
        for t in range(1, len(ms)):
            head = ms[: t + 1]
            if tri.side_label(head[-1]) != "RightSide" or not all(tri.contains(p) for p in head):
                continue
            x = head[-1]
            for i in i_range:
                trap = trapezoid(i, x)
                tail = ms[t:]
                if all(trap.contains(p) for p in tail) and trap.side_label(tail[-1]) == ending:
                    total += 1
    return total


# -- displacement ----------------------------------------------------------------------------

@dataclass
class DisplacementStats:
    n: int
    hist: dict  # squared max displacement -> count
    projections: dict  # angle -> {max projection: count}
    total: int

    def event_count(self, c: float = 1e11) -> int:
        """Walks whose max displacement reaches c*n/log(n+1)."""
        if self.n == 0:
            return self.total
        thr = Fraction(c) * self.n / Fraction(log(self.n + 1))
        return sum(v for d2, v in self.hist.items() if d2 >= thr * thr)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "sq_displacement_num", "sq_displacement_den", "count"])
        for d2 in sorted(self.hist):
            w.writerow([self.n, d2.numerator, d2.denominator, self.hist[d2]])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "total": self.total,
            "hist": [[str(d2), v] for d2, v in sorted(self.hist.items())],
            "projections": {
                th: [[f"{q.rat}+{q.irr}*sqrt3", v] for q, v in sorted(h.items(), key=lambda kv: float(kv[0]))]
                for th, h in self.projections.items()
            },
        })


def displacement_stats(n: int, cap: int = DISPLACEMENT_CAP) -> DisplacementStats:
    """Exact law of max_k |gamma_k|^2 under the uniform measure on n-step walks."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise ResourceError(f"n={n} exceeds the displacement cap {cap}")
    hist = Counter()
    proj = {"pi/2": Counter(), "pi/6": Counter()}
    total = 0
    for w in walks_in(plane(), ORIGIN, n):
        if w.length != n:
            continue
        total += 1
        hist[max(grid_squared_norm(m) for m in w)] += 1
        for th in proj:
            proj[th][max_projection(w, th)] += 1
    return DisplacementStats(n, dict(hist), {k: dict(v) for k, v in proj.items()}, total)
