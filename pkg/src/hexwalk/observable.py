"""The parafermionic observable and its exact local and contour identities."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from . import cyclo
from .cyclo import CycNum
from .domains import Domain
from .enumerator import PHASE_SUM, EnumResult, EnumSpec, enumerate_walks, parallel_enumerate
from .hexlattice import (
    DIRECTION_EXPONENT,
    MidEdge,
    check_mid,
    check_vertex,
    endpoints,
    vertex_mids,
)


class ObservableError(ValueError):
    pass


def _direction(v, p) -> CycNum:
    """p - v as an element of the field: (sqrt3/6) * zeta^d."""
    d = DIRECTION_EXPONENT[(p[0] - v[0], p[1] - v[1])]
    return cyclo.constant("sqrt3") * Fraction(1, 6) * cyclo.zeta(d)


@dataclass(frozen=True)
class ObservableField:
    domain: Domain
    start: MidEdge
    sigma: Fraction
    x: CycNum
    max_length: int
    values: dict
    exact: bool
    result: EnumResult = field(repr=False, compare=False)

    def __getitem__(self, z) -> CycNum:
        return self.values.get(MidEdge(*z), CycNum(0))

    def mids(self) -> list:
        return self.result.classes

    def winding_classes(self, z) -> list[int]:
        """Windings mod 48 realised by walks a -> z."""
        c = self.result.classes.index(MidEdge(*z))
        h = self.result.hist[c]
        return [w for w in range(48) if h[w].any()]

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "start": list(self.start),
            "sigma": str(self.sigma),
            "x": self.x.to_json(),
            "cap": self.max_length,
            "exact": self.exact,
            "values": [[list(m), v.to_json()] for m, v in sorted(self.values.items())],
        }

    def to_csv(self, digits: int = 12) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xq", "yq", "re", "im"])
        for m, v in sorted(self.values.items()):
            re, im = cyclo.approximate(v, digits)
            w.writerow([m[0], m[1], re, im])
        return buf.getvalue()


def compute_observable(domain: Domain, a, sigma=Fraction(5, 8), x: CycNum | None = None,
                       L: int | None = None, workers: int = 1) -> ObservableField:
    """F(z) = sum over walks a -> z in the domain of exp(-i sigma W) x^length."""
    a = check_mid(a)
    if not domain.contains(a):
        raise ObservableError(f"start {tuple(a)} is not in the domain")
    x = cyclo.constant("x_c") if x is None else x
    sigma = Fraction(sigma)
    if L is None:
        if not domain.bounded:
            raise ObservableError("an unbounded domain needs an explicit cap L")
        L = max(len(domain.mids()) - 1, 0)
    spec = EnumSpec(domain, a, L, accumulators=(PHASE_SUM,), x=x, sigma=sigma)
    res = parallel_enumerate(spec, workers) if workers > 1 else enumerate_walks(spec)
    values = res.phase_sums(x, sigma)
    return ObservableField(domain, a, sigma, x, L, values, domain.bounded and not res.truncated, res)


def vertex_residual(field: ObservableField, v) -> CycNum:
    """(p-v)F(p) + (q-v)F(q) + (r-v)F(r) for the three mid-edges around v."""
    v = check_vertex(v)
    total = CycNum(0)
    for p in vertex_mids(v):
        if not field.domain.contains(p):
            raise ObservableError(f"vertex {tuple(v)} has mid-edge {tuple(p)} outside the domain")
        total = total + _direction(v, p) * field[p]
    return total


def interior_vertices(field: ObservableField) -> list:
    if not field.domain.bounded:
        raise ObservableError("V(Omega) is only listed for bounded domains")
    return field.domain.vertices()


def _require_contour(field: ObservableField):
    if not field.domain.bounded:
        raise ObservableError("contour identities need a bounded domain")
    if not field.exact:
        raise ObservableError("field is truncated; contour identities are only exact for complete sums")


def contour_integral(field: ObservableField) -> CycNum:
    """Sum of vertex residuals over V(Omega)."""
    _require_contour(field)
    total = CycNum(0)
    for v in interior_vertices(field):
        total = total + vertex_residual(field, v)
    return total


def boundary_contour_sum(field: ObservableField) -> CycNum:
    """The telescoped form: sum over z in the boundary of (z - v_z) F(z), v_z its inner endpoint."""
    _require_contour(field)
    inner = set(interior_vertices(field))
    total = CycNum(0)
    for z in field.domain.boundary_mids():
        vs = [v for v in endpoints(z) if v in inner]
        total = total + _direction(vs[0], z) * field[z]
    return total


def boundary_phase_check(field: ObservableField) -> dict:
    """For boundary z: walks a -> z share one winding w_z (mod 48) and F(z)*phase(-w_z) is real.

    Returns z -> (w_z, ok).  w_z is also checked against the geometry: the
    direction change from the inward edge at a to the outward edge at z must
    equal w_z * pi/3 modulo 2 pi.
    """
    inner = set(interior_vertices(field))
    a = field.start

    def outward(z):
        vin = [v for v in endpoints(z) if v in inner]
        vout = [v for v in endpoints(z) if v not in inner]
        if len(vin) != 1 or len(vout) != 1:
            return None
        return DIRECTION_EXPONENT[(vout[0][0] - z[0], vout[0][1] - z[1])]

    da = outward(a)
    out = {}
    for z in field.domain.boundary_mids():
        if z == a or z not in field.values:
            continue
        ws = field.winding_classes(z)
        if len(ws) != 1:
            out[z] = (None, False)
            continue
        w = ws[0]
        e = cyclo.phase_exponent(field.sigma)
        val = field[z] * cyclo.zeta(e * w)
        ok = val.is_real()
        dz = outward(z)
        if da is not None and dz is not None:
            # inward at a is the outward direction rotated by pi (24 zeta units)
            ok = ok and ((dz - (da + 24)) - 8 * w) % 48 == 0
        out[z] = (w, ok)
    return out
