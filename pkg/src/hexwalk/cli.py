"""hexwalk command line: verify, partition, decompose, unfold, renewals, displacement, render, cache."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import cyclo, partitions as P
from .cache import DiskCache, Runner
from .constructions import (
    ConstructionError,
    bridge_decompose,
    displacement_stats,
    hw_unfold,
    is_bridge,
    is_horizontal_bridge,
    reconstruct,
    renewal_times,
)
from .cyclo import CycNum
from .domains import plane, strip, trapezoid, triangle
from .enumerator import DEFAULT_BUDGET, ResourceError, walks_in
from .hexlattice import LatticeError, Walk
from .observable import (
    ObservableError,
    boundary_contour_sum,
    compute_observable,
    contour_integral,
    interior_vertices,
    vertex_residual,
)
from .render import RenderError, read_walk_file, render_svg

EXIT_PASS, EXIT_FAIL, EXIT_RESOURCE, EXIT_USAGE = 0, 1, 2, 3

# suite names are part of the command-line interface
SUITES = ("vertex-relation", "contour", "eq21", "eq22", "trapezoid", "monotonicity",
          "lemma27", "lemma31", "bracket-consistency", "all")
TRAPEZOID_INSTANCES = ((1, (1, 3)), (2, (1, 3)), (2, (5, 3)))


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    max_length: int = 24
    triangle_cap: int = P.TRIANGLE_CAP
    workers: int = 1
    cache_dir: str | None = None
    fmt: str = "json"
    precision: int = 12
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        for name in ("max_length", "triangle_cap", "workers", "precision", "budget"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if self.fmt not in ("csv", "json"):
            raise UsageError("format must be csv or json")

    def runner(self) -> Runner:
        return Runner(self.workers, self.budget, self.cache_dir)


def parse_range(text: str) -> list[int]:
    """'3' -> [3]; '0..2' -> [0, 1, 2]; '1,4' -> [1, 4]."""
    out = []
    try:
        for part in text.split(","):
            if ".." in part:
                a, b = part.split("..")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None
    if not out:
        raise UsageError("empty range")
    return out


def parse_rational(text: str) -> CycNum:
    try:
        return CycNum(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--x expects an exact rational such as 1/2, got {text!r}") from None


def parse_mid(text: str):
    try:
        a, b = text.split(",")
        return (int(a), int(b))
    except ValueError:
        raise UsageError(f"expected 'xq,yq', got {text!r}") from None


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", help="index or range, e.g. 2 or 0..3")
    common.add_argument("--cap", type=int, help="length cap for series")
    common.add_argument("--workers", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--cache-dir")
    common.add_argument("--budget", type=int, help="max walks visited per enumeration")
    common.add_argument("--precision", type=int, help="decimal digits in reports")
    common.add_argument("--x", help="off-critical weight as an exact rational")
    common.add_argument("--config", help="file of key=value lines mirroring the flags")

    p = _Parser(prog="hexwalk", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run an identity/inequality suite")
    v.add_argument("suite", choices=SUITES)

    t = sub.add_parser("partition", parents=[common], help="partition function table")
    t.add_argument("target", choices=("D", "Atri", "B", "A", "G", "F"))
    t.add_argument("--start", help="trapezoid start mid-edge xq,yq (target F)")

    d = sub.add_parser("decompose", parents=[common], help="bridge decomposition")
    d.add_argument("--walk", help="walk file; default: every bridge up to --cap")
    d.add_argument("--m", type=int, default=1)

    u = sub.add_parser("unfold", parents=[common], help="Hammersley-Welsh unfolding")
    u.add_argument("--walk", help="walk file; default: first non-bridge walk of length --n")
    u.add_argument("--n", type=int, default=8)

    r = sub.add_parser("renewals", parents=[common], help="renewal times of triangle walks")
    r.add_argument("--walk", help="walk file; default: every walk of Tria_{2k+1}")

    s = sub.add_parser("displacement", parents=[common], help="exact max-displacement law")
    s.add_argument("--n", type=int, required=True)

    g = sub.add_parser("render", parents=[common], help="SVG of a walk")
    g.add_argument("walkfile")
    g.add_argument("--domain", help="triangle:K, trapezoid:I:XQ,YQ or strip:K")
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--out", help="output path (default stdout)")

    c = sub.add_parser("cache", parents=[common], help="inspect or clear the cache")
    c.add_argument("action", choices=("list", "clear"))
    return p


def make_config(args) -> RunConfig:
    file_vals = read_config(args.config) if getattr(args, "config", None) else {}

    def pick(flag, key, conv, default):
        val = getattr(args, flag, None)
        if val is not None:
            return val
        if key in file_vals:
            try:
                return conv(file_vals[key])
            except ValueError:
                raise UsageError(f"config: bad value for {key}") from None
        return default

    for key in ("k", "x"):
        if getattr(args, key, None) is None and key in file_vals:
            setattr(args, key, file_vals[key])
    return RunConfig(
        max_length=pick("cap", "cap", int, 24),
        workers=pick("workers", "workers", int, 1),
        cache_dir=pick("cache_dir", "cache_dir", str, None),
        fmt=pick("format", "format", str, "json"),
        precision=pick("precision", "precision", int, 12),
        budget=pick("budget", "budget", int, DEFAULT_BUDGET),
    )


# -- verify -----------------------------------------------------------------------

def _check(name, ok, detail=None, status=None):
    return {"name": name, "status": status or ("pass" if ok else "fail"), "detail": detail}


def _exact_detail(c: CycNum, digits: int) -> dict:
    return {"exact": P.exact_str(c), "decimal": cyclo.approximate(c, digits)[0]}


def _suite_vertex(cfg, runner, ks, x, contour: bool):
    out = []
    domains = [(f"Tria_{2 * k + 1}", triangle(k), (0, 0)) for k in ks]
    domains.append(("Trapezoid(1,(1,3))", trapezoid(1, (1, 3)), (1, 3)))
    for name, d, a in domains:
        f = compute_observable(d, a, x=x, workers=cfg.workers)
        if contour:
            ci = contour_integral(f)
            bs = boundary_contour_sum(f)
            out.append(_check(f"contour {name}", ci.is_zero() and ci == bs, _exact_detail(ci, cfg.precision)))
        else:
            bad = [v for v in interior_vertices(f) if not vertex_residual(f, v).is_zero()]
            detail = None
            if bad:
                detail = {"vertex": list(bad[0]), **_exact_detail(vertex_residual(f, bad[0]), cfg.precision)}
            out.append(_check(f"vertex relation {name}", not bad, detail))
    return out


def _suite_triangle_identity(cfg, runner, ks, x):
    out = []
    for k in ks:
        res = P.triangle_identity_residual(k, runner, cfg.triangle_cap, x)
        out.append(_check(f"triangle identity k={k}", res.is_zero(), _exact_detail(res, cfg.precision)))
    return out


def _suite_strip_brackets(cfg, runner, ks):
    out = []
    caps = sorted({12, 18, cfg.max_length})
    for k in ks:
        widths = []
        for L in caps:
            b = P.strip_B(k, L, runner)
            out.append(_check(f"B_{k} bracket nonempty L={L}", b.consistent(),
                              {"lower": P.decimal(b.lower), "upper": P.decimal(b.upper)}))
            widths.append(b.width())
        shrink = all(P.leq(widths[j + 1], widths[j]) for j in range(len(widths) - 1))
        out.append(_check(f"B_{k} widths non-increasing in L", shrink,
                          [P.decimal(w) for w in widths]))
    return out


def _suite_trapezoid(cfg, runner, x):
    out = []
    for i, s in TRAPEZOID_INSTANCES:
        t = P.trapezoid_F(i, s, runner, xval=x)
        out.append(_check(f"trapezoid identity ({i},{s})", t.residual.is_zero(), _exact_detail(t.residual, cfg.precision)))
        if x is None:
            out.append(_check(f"F^B >= cos(pi/8)/cos(pi/4) D^- ({i},{s})", t.bottom_inequality()))
    return out


def _status_checks(rows, prefix=""):
    return [_check(prefix + r["check"], r["status"] == "pass", {k: v for k, v in r.items() if k not in ("check", "status")},
                   status=r["status"]) for r in rows]


def run_suite(suite: str, cfg: RunConfig, ks=None, x=None) -> list[dict]:
    runner = cfg.runner()
    if suite == "all":
        out = []
        for s in SUITES[:-1]:
            out += run_suite(s, cfg, None, x)
        return out
    if suite in ("vertex-relation", "contour"):
        return _suite_vertex(cfg, runner, ks or [0, 1, 2, 3], x, suite == "contour")
    if suite == "eq22":
        return _suite_triangle_identity(cfg, runner, ks or [0, 1, 2], x)
    if suite == "eq21":
        return _suite_strip_brackets(cfg, runner, ks or [1, 2, 3])
    if suite == "trapezoid":
        return _suite_trapezoid(cfg, runner, x)
    if suite == "monotonicity":
        kmax = max(ks) if ks else 2
        return _status_checks(P.monotonicity_audit(kmax, runner, cfg.triangle_cap))
    if suite == "lemma27":
        kmax = max(ks) if ks else 8
        return _status_checks(P.g_sum_audit(kmax, cfg.max_length, (1, 2), runner)["checks"])
    if suite == "lemma31":
        out = []
        for k in ks or [1, 2]:
            r = P.renewal_expectation(k, runner, cfg.triangle_cap)
            out.append(_check(f"E[N] <= bound k={k}", r.ok, {"E": P.decimal(r.E), "bound": P.decimal(r.bound)}))
            mc = P.markov_check(k, runner, cfg.triangle_cap)
            out.append(_check(f"Markov step k={k}", all(mc.values()), mc))
        return out
    if suite == "bracket-consistency":
        return _status_checks(P.bracket_consistency_audit(ks or [0, 1, 2, 3], cfg.max_length, runner, cfg.triangle_cap))
    raise UsageError(f"unknown suite {suite}")


def cmd_verify(args, cfg) -> int:
    ks = parse_range(args.k) if args.k else None
    x = parse_rational(args.x) if args.x else None
    checks = run_suite(args.suite, cfg, ks, x)
    failed = any(c["status"] == "fail" for c in checks)
    report = {"suite": args.suite, "status": "fail" if failed else "pass", "checks": checks}
    if x is not None:
        report["x"] = args.x
    _emit_report(report, cfg)
    return EXIT_FAIL if failed else EXIT_PASS


def _emit_report(report, cfg):
    if cfg.fmt == "json":
        print(json.dumps(report, indent=1, default=str))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "check", "status", "detail"])
        for c in report["checks"]:
            w.writerow([report["suite"], c["name"], c["status"], json.dumps(c["detail"], default=str)])
        print(buf.getvalue(), end="")


# -- partition ----------------------------------------------------------------------------

def cmd_partition(args, cfg) -> int:
    runner = cfg.runner()
    L = cfg.max_length
    ks = parse_range(args.k) if args.k else [0]
    rows = []
    if args.target in ("D", "Atri"):
        for k in ks:
            D, A = P.triangle_D(k, runner, cfg.triangle_cap)
            val = D if args.target == "D" else A
            rows.append(P.PartitionBracket(args.target, (k,), val, val, None, True))
    elif args.target == "B":
        rows = [P.strip_B(k, L, runner) for k in ks]
    elif args.target == "A":
        rows = [P.strip_A(k, L, runner) for k in ks]
    elif args.target == "G":
        if min(ks) < 1:
            raise UsageError("G_k needs k >= 1")
        rows = P.halfplane_G(min(ks), max(ks), L, runner)
        rows = [b for b in rows if b.params[0] in ks]
    elif args.target == "F":
        start = parse_mid(args.start or "1,3")
        for i in ks:
            t = P.trapezoid_F(i, start, runner)
            for side, val in sorted(t.F.items()):
                rows.append(P.PartitionBracket(f"F^{side[0]}", (i, f"{start[0]};{start[1]}"), val, val, None, True))
            rows.append(P.PartitionBracket("D^-", (i, f"{start[0]};{start[1]}"), t.D_minus, t.D_minus, None, True))
    if cfg.fmt == "csv":
        print(P.brackets_to_csv(rows, cfg.precision), end="")
    else:
        print(P.brackets_to_json(rows))
    if runner.disk is not None:
        print(f"cache: hits={runner.disk.hits} misses={runner.disk.misses}", file=sys.stderr)
    return EXIT_PASS


# -- constructions ---------------------------------------------------------------------------

def _load_walk(path) -> Walk:
    try:
        return read_walk_file(path)
    except OSError as exc:
        raise UsageError(str(exc)) from None


def cmd_decompose(args, cfg) -> int:
    if args.walk:
        walks = [_load_walk(args.walk)]
    else:
        cap = min(cfg.max_length, 12) if args.cap is None else cfg.max_length
        walks = [w for k in range(args.m, cap // 2 + 1)
                 for w in walks_in(strip(k), (0, 0), cap, lambda m, k=k: m[1] == 6 * k)]
    records = []
    ok_all = True
    for w in walks:
        rec = bridge_decompose(w, w.length, args.m)
        ok = reconstruct(rec) == w and sum(rec.I) * args.m <= w.length + 1
        ok_all &= ok
        records.append({**rec.to_json(), "round_trip": reconstruct(rec) == w, "bound_ok": ok})
    if args.walk:
        print(json.dumps(records[0], indent=1))
    else:
        print(json.dumps({"count": len(records), "round_trip": ok_all}, indent=1))
    return EXIT_PASS if ok_all else EXIT_FAIL


def cmd_unfold(args, cfg) -> int:
    if args.walk:
        w = _load_walk(args.walk)
    else:
        w = next((v for v in walks_in(plane(), (0, 0), args.n)
                  if v.length == args.n and not is_horizontal_bridge(v)), None)
        if w is None:
            raise UsageError(f"no non-bridge walk of length {args.n}")
    u = hw_unfold(w)
    cert = {
        "input": [list(m) for m in w],
        "output": [list(m) for m in u],
        "horizontal_bridge": is_horizontal_bridge(u),
        "vertical_bridge": is_bridge(u),
        "length_preserved": u.length == w.length,
    }
    print(json.dumps(cert, indent=1))
    return EXIT_PASS if cert["horizontal_bridge"] and cert["length_preserved"] else EXIT_FAIL


def cmd_renewals(args, cfg) -> int:
    k = parse_range(args.k)[0] if args.k else 0
    if args.walk:
        walks = [_load_walk(args.walk)]
    else:
        d = triangle(k)
        walks = list(walks_in(d, (0, 0), len(d.mids()) - 1))
    profiles = [renewal_times(w, k).to_json() for w in walks]
    if cfg.fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["walk", "k", "renewals", "N"])
        for p in profiles:
            wr.writerow([json.dumps(p["walk"]), p["k"], " ".join(map(str, p["renewals"])), p["N"]])
        print(buf.getvalue(), end="")
    else:
        print(json.dumps(profiles if not args.walk else profiles[0], indent=1))
    return EXIT_PASS


def cmd_displacement(args, cfg) -> int:
    st = displacement_stats(args.n)
    print(st.to_csv() if cfg.fmt == "csv" else st.to_json(), end="" if cfg.fmt == "csv" else "\n")
    return EXIT_PASS


def _parse_domain(text):
    parts = text.split(":")
    try:
        if parts[0] == "triangle":
            return triangle(int(parts[1]))
        if parts[0] == "strip":
            return strip(int(parts[1]))
        if parts[0] == "trapezoid":
            return trapezoid(int(parts[1]), parse_mid(parts[2]))
    except (IndexError, ValueError):
        pass
    raise UsageError(f"bad domain {text!r}; use triangle:K, trapezoid:I:XQ,YQ or strip:K")


def cmd_render(args, cfg) -> int:
    w = read_walk_file(args.walkfile)
    d = _parse_domain(args.domain) if args.domain else None
    svg = render_svg(w, d, args.scale)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_PASS


def cmd_cache(args, cfg) -> int:
    if not cfg.cache_dir:
        raise UsageError("cache needs --cache-dir")
    dc = DiskCache(cfg.cache_dir)
    if args.action == "clear":
        dc.clear()
        print("cleared")
    else:
        print(json.dumps(dc.entries(), indent=1))
    return EXIT_PASS


COMMANDS = {
    "verify": cmd_verify,
    "partition": cmd_partition,
    "decompose": cmd_decompose,
    "unfold": cmd_unfold,
    "renewals": cmd_renewals,
    "displacement": cmd_displacement,
    "render": cmd_render,
    "cache": cmd_cache,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, parse errors exit with EXIT_USAGE
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = make_config(args)
        return COMMANDS[args.cmd](args, cfg)
    except UsageError as exc:
        print(f"hexwalk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"hexwalk: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RenderError as exc:
        print(f"hexwalk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConstructionError, ObservableError, LatticeError) as exc:
        print(f"hexwalk: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
