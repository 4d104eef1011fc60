"""Partition functions: exact values on bounded domains, brackets on unbounded ones.

Index conventions for the triangle sums: D_0 = 1/cos(pi/8), D_{2k+1} is the
weight of triangle walks of Tria_{2k+1} ending on the right or left side, and
D_{2k+2} = D_{2k+1}.

Every strip bracket combines two exact truncations of one enumeration: the
bridge series from below, and 1 - cos(3pi/8) A_k^(L) from above, which is an
upper bound because A_k^(L) <= A_k and B_k + cos(3pi/8) A_k = 1.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

import numpy as np

from . import cyclo
from .cache import Runner, default_runner
from .cyclo import CycNum
from .domains import half_plane, rotate_translate_triangle, strip, trapezoid, triangle
from .enumerator import (
    PER_ENDPOINT,
    RENEWAL,
    EnumSpec,
    ResourceError,
    evaluate_histogram,
)
from .hexlattice import MidEdge, check_mid

TRIANGLE_CAP = 4
TRAPEZOID_MID_CAP = 120
SERIES_CAP = 30

COS1 = cyclo.constant("cos_pi_8")
COS3 = cyclo.constant("cos_3pi_8")
COS2 = cyclo.constant("cos_pi_4")
ONE = CycNum(1)


def exact_str(c: CycNum | None) -> str:
    if c is None:
        return ""
    body = repr(c)
    return body[len("CycNum("):-1]


def decimal(c: CycNum | None, digits: int = 12) -> str:
    if c is None:
        return ""
    return cyclo.approximate(c, digits)[0]


def leq(a, b) -> bool:
    return cyclo.compare(a, b) <= 0


@dataclass(frozen=True)
class PartitionBracket:
    target: str
    params: tuple
    lower: CycNum
    upper: CycNum | None
    cap: int | None
    exact: bool

    def width(self) -> CycNum | None:
        return None if self.upper is None else self.upper - self.lower

    def consistent(self) -> bool:
        return self.upper is None or leq(self.lower, self.upper)

    def row(self, digits: int = 12) -> dict:
        dec = decimal(self.lower, digits)
        if self.upper is not None and not self.exact:
            dec = f"[{dec}, {decimal(self.upper, digits)}]"
        return {
            "target": self.target,
            "k": ",".join(str(p) for p in self.params),
            "cap": "" if self.cap is None else self.cap,
            "lower": exact_str(self.lower),
            "upper": exact_str(self.upper),
            "exact": str(self.exact).lower(),
            "decimal_12": dec,
        }

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "params": list(self.params),
            "cap": self.cap,
            "lower": self.lower.to_json(),
            "upper": None if self.upper is None else self.upper.to_json(),
            "exact": self.exact,
            "decimal": decimal(self.lower),
        }


CSV_COLUMNS = ["target", "k", "cap", "lower", "upper", "exact", "decimal_12"]


def brackets_to_csv(brackets, digits: int = 12) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for b in brackets:
        w.writerow(b.row(digits))
    return buf.getvalue()


def brackets_to_json(brackets) -> str:
    return json.dumps([b.to_json() for b in brackets], indent=1)


# -- helpers --------------------------------------------------------------------

def _runner(runner: Runner | None) -> Runner:
    return default_runner() if runner is None else runner


def _group_sum(res, key, x=None, min_len: int = 0) -> dict:
    """Exact weights grouped by key(endpoint); classes with key None are skipped."""
    x = res.spec.x if x is None else x
    groups: dict = {}
    for c, m in enumerate(res.classes):
        g = key(m)
        if g is None:
            continue
        h = res.hist[c]
        if g in groups:
            groups[g] = groups[g] + h
        else:
            groups[g] = h.copy()
    out = {}
    for g, h in groups.items():
        if min_len:
            h[:, :min_len] = 0
        out[g] = evaluate_histogram(h, x)
    return out


def _check_series_cap(L: int, cap: int):
    if L > cap:
        raise ResourceError(f"length cap {L} exceeds the configured series cap {cap}")


# -- triangles ----------------------------------------------------------------------

@dataclass
class TriangleData:
    k: int
    D: CycNum
    A_tri: CycNum
    per_endpoint: dict  # endpoint on the right/left side -> D(x)
    side: dict  # endpoint -> side label
    result: object = field(repr=False)


def triangle_result(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP):
    """One full enumeration of Tria_{2k+1} with endpoint classes and renewal counts."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > cap:
        raise ResourceError(f"Tria_{2 * k + 1} is beyond the triangle cap k <= {cap}")
    d = triangle(k)
    L = len(d.mids()) - 1
    spec = EnumSpec(d, (0, 0), L, accumulators=(PER_ENDPOINT, RENEWAL), renewal_lines=k + 1)
    return _runner(runner).run(spec)


def triangle_data(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP,
                  x: CycNum | None = None) -> TriangleData:
    res = triangle_result(k, runner, cap)
    d = res.spec.domain
    side = {m: d.side_label(m) for m in res.classes}
    x = res.spec.x if x is None else x
    per = {}
    for c, m in enumerate(res.classes):
        if side[m] in ("RightSide", "LeftSide") and res.hist[c].any():
            per[m] = evaluate_histogram(res.hist[c], x)
    D = sum(per.values(), CycNum(0))
    A = _group_sum(res, lambda m: "A" if side[m] == "RealAxis" else None, x, min_len=1).get("A", CycNum(0))
    return TriangleData(k, D, A, per, side, res)


def triangle_D(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP,
               x: CycNum | None = None) -> tuple[CycNum, CycNum]:
    """(D_{2k+1}, A^tri_{2k+1}) exactly."""
    t = triangle_data(k, runner, cap, x)
    return t.D, t.A_tri


def D_value(n: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP) -> CycNum:
    """D_n with D_0 = 1/cos(pi/8) and D_{2k+2} = D_{2k+1}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return COS1.inv()
    if n % 2 == 0:
        n -= 1
    return triangle_D((n - 1) // 2, runner, cap)[0]


def max_exact_D_index(cap: int = TRIANGLE_CAP) -> int:
    return 2 * cap + 2


def triangle_identity_residual(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP,
                  x: CycNum | None = None) -> CycNum:
    D, A = triangle_D(k, runner, cap, x)
    return COS3 * A + COS1 * D - 1


# -- strips and the half-plane -----------------------------------------------------------

def strip_result(k: int, L: int, runner: Runner | None = None, cap: int = SERIES_CAP):
    _check_series_cap(L, cap)
    spec = EnumSpec(strip(k), (0, 0), L, accumulators=(PER_ENDPOINT,))
    return _runner(runner).run(spec)


def strip_B(k: int, L: int, runner: Runner | None = None, cap: int = SERIES_CAP,
            x: CycNum | None = None) -> PartitionBracket:
    if k < 0:
        raise ValueError("k must be nonnegative")
    res = strip_result(k, L, runner, cap)
    top = 6 * k

    def key(m):
        if m[1] == top:
            return "B"
        if m[1] == 0:
            return "A"
        return None

    g = _group_sum(res, key, x)
    B = g.get("B", CycNum(0))
    # the trivial walk ends on the real axis; it is a bridge only when k = 0
    A = _group_sum(res, lambda m: "A" if m[1] == 0 else None, x, min_len=1).get("A", CycNum(0))
    upper = ONE - COS3 * A
    exact = not res.truncated
    return PartitionBracket("B", (k,), B, upper, L, exact)


def strip_A(k: int, L: int, runner: Runner | None = None, cap: int = SERIES_CAP,
            x: CycNum | None = None) -> PartitionBracket:
    """Truncated A_k: strip walks ending on the real axis with positive length (lower bound only)."""
    res = strip_result(k, L, runner, cap)
    A = _group_sum(res, lambda m: "A" if m[1] == 0 else None, x, min_len=1).get("A", CycNum(0))
    return PartitionBracket("A", (k,), A, None, L, not res.truncated)


def halfplane_result(L: int, runner: Runner | None = None, cap: int = SERIES_CAP):
    _check_series_cap(L, cap)
    spec = EnumSpec(half_plane(), (0, 0), L, accumulators=(PER_ENDPOINT,))
    return _runner(runner).run(spec)


def halfplane_G(k_min: int, k_max: int, L: int, runner: Runner | None = None,
                cap: int = SERIES_CAP, x: CycNum | None = None) -> list[PartitionBracket]:
    """Truncated G_k for k_min <= k <= k_max: U-walks ending at the mid-edge (4k, 0)."""
    if not 1 <= k_min <= k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    res = halfplane_result(L, runner, cap)
    g = _group_sum(res, lambda m: m[0] // 4 if m[1] == 0 and m[0] > 0 else None, x)
    return [PartitionBracket("G", (k,), g.get(k, CycNum(0)), None, L, False) for k in range(k_min, k_max + 1)]


def g_sum_audit(k_max: int, L: int, Ts=(1, 2), runner: Runner | None = None,
                  triangle_cap: int = TRIANGLE_CAP) -> dict:
    """Sum bound for truncated G and the tail bound against exact D_{2T-1}."""
    gs = halfplane_G(1, k_max, L, runner)
    total = sum((b.lower for b in gs), CycNum(0))
    bound = (COS3 * 2).inv()
    checks = [{
        "check": "sum",
        "cap": L,
        "lhs": decimal(total),
        "rhs": decimal(bound),
        "status": "pass" if leq(total, bound) else "fail",
    }]
    for T in Ts:
        tail = sum((b.lower for b in gs if b.params[0] >= T), CycNum(0))
        rhs = COS1 / (COS3 * 2) * D_value(2 * T - 1, runner, triangle_cap)
        checks.append({
            "check": f"tail T={T}",
            "cap": L,
            "lhs": decimal(tail),
            "rhs": decimal(rhs),
            "status": "pass" if leq(tail, rhs) else "fail",
        })
    for b in gs:
        if cyclo.compare(b.lower, 0) < 0:
            checks.append({"check": f"G_{b.params[0]} nonnegative", "status": "fail"})
    return {"G": gs, "checks": checks}


# -- trapezoids -------------------------------------------------------------------------

@dataclass
class TrapezoidData:
    i: int
    x: MidEdge
    F: dict  # side -> exact weight; "LeftSide" excludes the trivial walk
    D_rot_right: CycNum
    D_minus: CycNum
    mids: int

    @property
    def residual(self) -> CycNum:
        F = self.F
        return COS3 * F["LeftSide"] + COS1 * (F["RightSide"] + F["TopSide"]) + COS2 * F["BottomSide"] - 1

    def bottom_inequality(self) -> bool:
        return leq(COS1 / COS2 * self.D_minus, self.F["BottomSide"])


def trapezoid_F(i: int, x, runner: Runner | None = None, mid_cap: int = TRAPEZOID_MID_CAP,
                with_D_minus: bool = True, xval: CycNum | None = None) -> TrapezoidData:
    x = check_mid(x)
    d = trapezoid(i, x)
    ms = d.mids()
    if len(ms) > mid_cap:
        raise ResourceError(f"Trapezoid({i}, {tuple(x)}) has {len(ms)} mid-edges; cap is {mid_cap}")
    run = _runner(runner)
    res = run.run(EnumSpec(d, x, len(ms) - 1, accumulators=(PER_ENDPOINT,)))
    F = {s: CycNum(0) for s in ("LeftSide", "RightSide", "TopSide", "BottomSide")}
    F.update(_group_sum(res, d.side_label, xval, min_len=0))
    # the trivial walk ends at x; it is excluded from F^L
    F[d.side_label(x)] = F[d.side_label(x)] - 1
    D_rot = D_minus = CycNum(0)
    if with_D_minus:
        rot = rotate_translate_triangle(i, x)
        rms = rot.mids()
        rres = run.run(EnumSpec(rot, x, len(rms) - 1, accumulators=(PER_ENDPOINT,)))
        D_rot = _group_sum(rres, lambda m: "R" if rot.side_label(m) == "RightSide" else None, xval).get(
            "R", CycNum(0))
        D_minus = D_rot - F["RightSide"]
    return TrapezoidData(i, x, F, D_rot, D_minus, len(ms))


# -- renewals -------------------------------------------------------------------------

@dataclass
class RenewalExpectation:
    k: int
    E: CycNum
    bound: CycNum
    M: CycNum
    ok: bool


def renewal_expectation(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP) -> RenewalExpectation:
    t = triangle_data(k, runner, cap)
    ren = t.result.renewal_weights(per_endpoint=True)
    num = CycNum(0)
    for m, byN in ren.items():
        if m in t.per_endpoint:
            for N, w in byN.items():
                num = num + w * N
    E = num / t.D
    hi = ceil(Fraction(k + 1, 2))
    lo = (k + 1) // 2
    s = sum((D_value(i, runner, cap) for i in range(lo + 1)), CycNum(0))
    bound = COS1 * 2 * D_value(hi, runner, cap) / t.D * s
    return RenewalExpectation(k, E, bound, bound * 8, leq(E, bound))


@dataclass
class EndpointD:
    D: CycNum
    D_ren: CycNum


def per_endpoint_D(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP) -> dict:
    """x -> (D_{2k+1}(x), D^ren_{2k+1}(x)) over the right and left sides."""
    t = triangle_data(k, runner, cap)
    M = renewal_expectation(k, runner, cap).M
    ren = t.result.renewal_weights(per_endpoint=True)
    out = {}
    for m, Dx in t.per_endpoint.items():
        keep = CycNum(0)
        for N, w in ren.get(m, {}).items():
            if leq(CycNum(N), M):
                keep = keep + w
        out[m] = EndpointD(Dx, keep)
    return out


def markov_check(k: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP) -> dict:
    t = triangle_data(k, runner, cap)
    per = per_endpoint_D(k, runner, cap)
    total = sum((v.D for v in per.values()), CycNum(0))
    lost = sum((v.D - v.D_ren for v in per.values()), CycNum(0))
    return {
        "sum_matches": total == t.D,
        "subset": all(leq(v.D_ren, v.D) for v in per.values()),
        "markov": leq(lost * 8, t.D),
    }


# -- audits -------------------------------------------------------------------------

def monotonicity_audit(k_max: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP) -> list[dict]:
    vals = [D_value(0)] + [triangle_D(k, runner, cap)[0] for k in range(k_max + 1)]
    names = ["D_0"] + [f"D_{2 * k + 1}" for k in range(k_max + 1)]
    out = []
    for j in range(1, len(vals)):
        out.append({
            "check": f"{names[j]} <= {names[j - 1]}",
            "status": "pass" if leq(vals[j], vals[j - 1]) else "fail",
        })
    return out


def bracket_consistency_audit(ks, L: int, runner: Runner | None = None,
                              triangle_cap: int = TRIANGLE_CAP) -> list[dict]:
    """Bracket sanity, consistency with B_{k+1} <= B_k, and B_k <= cos(pi/8) D_k."""
    ks = list(ks)
    br = {k: strip_B(k, L, runner) for k in ks}
    out = []
    for k in ks:
        b = br[k]
        out.append({"check": f"B_{k} lower <= upper", "status": "pass" if b.consistent() else "fail"})
        if k + 1 in br:
            ok = leq(br[k + 1].lower, b.upper)
            out.append({"check": f"B_{k + 1} <= B_{k} not contradicted", "status": "pass" if ok else "fail"})
        if k >= 1 and k <= max_exact_D_index(triangle_cap):
            rhs = COS1 * D_value(k, runner, triangle_cap)
            ok = leq(b.upper, rhs)
            # a failure at finite L only means the cap is too small
            out.append({
                "check": f"B_{k} upper <= cos(pi/8) D_{k}",
                "status": "pass" if ok else "inconclusive",
            })
    return out


def triangle_walks_inside_strip_walks(k: int, L: int, runner: Runner | None = None,
                                      triangle_cap: int = TRIANGLE_CAP) -> bool:
    """Counts per (endpoint, length) of A^tri_{2k+1} never exceed those of A_{2k+1}^(L)."""
    t = triangle_data(k, runner, triangle_cap)
    s = strip_result(2 * k + 1, L, runner)
    sidx = {m: c for c, m in enumerate(s.classes)}
    n = min(t.result.hist.shape[2], s.hist.shape[2])
    for c, m in enumerate(t.result.classes):
        if t.side[m] != "RealAxis":
            continue
        a = t.result.hist[c].sum(axis=0)
        a[0] = 0
        if m not in sidx:
            if a.any():
                return False
            continue
        b = s.hist[sidx[m]].sum(axis=0)
        if np.any(a[:n] > b[:n]) or a[n:].any():
            return False
    return True


def vacuous_decay_check(k_max: int, runner: Runner | None = None, cap: int = TRIANGLE_CAP) -> list[dict]:
    """D_T <= 100 T^(-1e-10): since T^(-1e-10) > 0.99 here, D_T <= 99 suffices."""
    out = []
    for k in range(k_max + 1):
        T = 2 * k + 1
        ok = leq(triangle_D(k, runner, cap)[0], 99)
        out.append({"check": f"D_{T} <= 100 T^-eps", "status": "pass" if ok else "fail", "note": "vacuous"})
    return out


def recurrence_audit(T: int = 1, L: int = 24, runner: Runner | None = None,
                     triangle_cap: int = TRIANGLE_CAP) -> dict:
    """T^4 D_{18T}^5 <= 2^17 (sum_{i<=3T} D_i)^4 sum_{k=T}^{21T} G_k, reported honestly.

    The G sum is only known from below, so a violated check is inconclusive.
    The surrogate clamps out-of-range D indices to the largest exact one; since
    D is non-increasing this over-estimates the left side.
    """
    top = max_exact_D_index(triangle_cap)
    gs = halfplane_G(T, 21 * T, L, runner)
    G = sum((b.lower for b in gs), CycNum(0))
    report = {"T": T, "cap": L, "G_lower": decimal(G), "rhs_nonnegative": True}

    def side(idx_fn):
        d18 = D_value(idx_fn(18 * T), runner, triangle_cap)
        s = sum((D_value(idx_fn(i), runner, triangle_cap) for i in range(3 * T + 1)), CycNum(0))
        lhs = CycNum(T ** 4) * d18 ** 5
        rhs = CycNum(2 ** 17) * s ** 4 * G
        return lhs, rhs

    if 18 * T <= top and 3 * T <= top:
        lhs, rhs = side(lambda i: i)
        report["rhs_nonnegative"] = cyclo.compare(rhs, 0) >= 0
        report["lhs"], report["rhs_lower"] = decimal(lhs), decimal(rhs)
        report["status"] = "pass" if leq(lhs, rhs) else "inconclusive"
    else:
        report["status"] = "inconclusive"
        report["reason"] = f"D_{18 * T} beyond exact range at default caps (exact up to D_{top})"
    lhs, rhs = side(lambda i: min(i, top))
    report["rhs_nonnegative"] = report["rhs_nonnegative"] and cyclo.compare(rhs, 0) >= 0
    report["surrogate"] = {
        "clamped_to": top,
        "lhs_upper": decimal(lhs),
        "rhs_lower": decimal(rhs),
        "status": "pass" if leq(lhs, rhs) else "fail",
        "note": "smoke test only",
    }
    return report


def sigma_report(T: int = 1, runner: Runner | None = None, triangle_cap: int = TRIANGLE_CAP,
                 mid_cap: int = TRAPEZOID_MID_CAP) -> dict:
    """Which right-side points x of Tria_{2k+1}, T <= k <= 2T-1, admit 4T <= i <= 5T-1
    with D^-_{2i+1,x} >= D_{2i+1}/4, and which of the two cases follows.

    D^-_{2i+1,x} = D_{2i+1}/2 - F^R_{2i+1,x}: the rotated triangle is a copy of
    Tria_{2i+1} whose right side is the image of the original right side, and
    right-ending walks carry half of D by the mirror symmetry.  i_x is the
    smallest qualifying i.  Points whose trapezoids exceed mid_cap stay
    undecided; the case is reported only when it is settled regardless.
    """
    if 5 * T - 1 > triangle_cap or 2 * T - 1 > triangle_cap:
        return {"T": T, "status": "inconclusive",
                "reason": f"needs D_{10 * T - 1}; exact triangles stop at k = {triangle_cap}"}
    run = _runner(runner)
    points = []
    in_sigma = undecided = total = CycNum(0)
    for k in range(T, 2 * T):
        t = triangle_data(k, run, triangle_cap)
        total = total + t.D
        for x, Dx in sorted(t.per_endpoint.items()):
            if t.side[x] != "RightSide":
                continue
            row = {"k": k, "x": list(x), "D_x": decimal(Dx), "i_x": None, "checked": []}
            open_i = False
            for i in range(4 * T, 5 * T):
                if len(trapezoid(i, x).mids()) > mid_cap:
                    open_i = True
                    row["checked"].append({"i": i, "status": "over mid cap"})
                    continue
                Di = triangle_D(i, run, triangle_cap)[0]
                FR = trapezoid_F(i, x, run, mid_cap, with_D_minus=False).F["RightSide"]
                ok = leq(Di / 4, Di / 2 - FR)
                row["checked"].append({"i": i, "D_minus": decimal(Di / 2 - FR), "ok": ok})
                if ok:
                    row["i_x"] = i
                    break
            if row["i_x"] is not None:
                row["status"] = "in"
                in_sigma = in_sigma + Dx
            elif open_i:
                row["status"] = "undecided"
                undecided = undecided + Dx
            else:
                row["status"] = "out"
            points.append(row)
    quarter = total / 4
    if leq(quarter, in_sigma):
        case = "a"
    elif not leq(quarter, in_sigma + undecided):
        case = "b"
    else:
        case = None
    return {
        "T": T,
        "points": points,
        "sigma_weight": decimal(in_sigma),
        "undecided_weight": decimal(undecided),
        "quarter_D": decimal(quarter),
        "case": case,
        "status": "inconclusive" if case is None else "decided",
    }
