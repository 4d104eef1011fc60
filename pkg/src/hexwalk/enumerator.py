"""Exhaustive depth-first enumeration of self-avoiding walks.

A search runs on a finite region graph: the domain's mid-edges (intersected
with the ball a walk of the given length can reach) with, for every mid-edge,
its up to four neighbours in lexicographic order.  The compiled kernel records
every visited walk in an integer histogram indexed by

    (endpoint class, winding mod 48, length)

and optionally by the number of renewal lines crossed exactly once.  Exact
partition functions and observables are read off the histogram afterwards, so
changing x or sigma never requires a new search.
"""

from __future__ import annotations

import json
import os
from math import lcm
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numba
import numpy as np

from . import cyclo
from .cyclo import CycNum
from .domains import Domain, plane, renewal_line_value
from .hexlattice import MidEdge, Walk, check_mid, endpoints, neighbors, step_turn

DEFAULT_MAX_LENGTH = 40
DEFAULT_BUDGET = 4_000_000_000
COUNT_SAWS_CAP = 30

WEIGHT_SUM = "WeightSum"
PER_ENDPOINT = "PerEndpointWeight"
PHASE_SUM = "PhaseWeightedSum"
RENEWAL = "RenewalCounter"
COLLECT = "WalkCollector"


class EnumerationError(ValueError):
    """Contract violation (start outside the domain, bad parameters)."""


class ResourceError(RuntimeError):
    """A cap or the walk budget was exceeded."""


# -- region graph -------------------------------------------------------------

@dataclass
class RegionGraph:
    mids: list
    index: dict
    nxt: np.ndarray  # [M,4] neighbour index or -1
    nxt_exit: np.ndarray  # [M,4] endpoint (0/1) of this mid used for the step
    nxt_entry: np.ndarray  # [M,4] endpoint of the neighbour used for the step
    nxt_turn: np.ndarray  # [M,4] turn sign of the step

    @property
    def size(self) -> int:
        return len(self.mids)


def region_mids(domain: Domain, start, max_length: int) -> list:
    r2 = 12 * max_length * max_length
    return domain.mids_in_ball(start, r2)


def build_graph(mids: Sequence) -> RegionGraph:
    mids = sorted(MidEdge(*m) for m in mids)
    index = {m: i for i, m in enumerate(mids)}
    M = len(mids)
    nxt = np.full((M, 4), -1, np.int32)
    nxt_exit = np.zeros((M, 4), np.int8)
    nxt_entry = np.zeros((M, 4), np.int8)
    nxt_turn = np.zeros((M, 4), np.int8)
    for i, m in enumerate(mids):
        em = endpoints(m)
        o = 0
        for p, v in neighbors(m):
            j = index.get(p)
            if j is None:
                continue
            nxt[i, o] = j
            nxt_exit[i, o] = em.index(v)
            nxt_entry[i, o] = endpoints(p).index(v)
            nxt_turn[i, o] = step_turn(m, p)
            o += 1
    return RegionGraph(mids, index, nxt, nxt_exit, nxt_entry, nxt_turn)


# -- compiled kernel ------------------------------------------------------------

@numba.njit(nogil=True, cache=True)
def _dfs_kernel(nxt, nxt_exit, nxt_entry, nxt_turn, cls, line_id, nlines,
                path, path_entry, w0, max_len, hist, ren_hist, use_ren, budget):
    M = nxt.shape[0]
    visited = np.zeros(M, np.uint8)
    line_cnt = np.zeros(max(nlines, 1), np.int32)
    nren = 0
    p = path.shape[0] - 1
    for t in range(p + 1):
        visited[path[t]] = 1
        if use_ren:
            l = line_id[path[t]]
            if l >= 0:
                line_cnt[l] += 1
                if line_cnt[l] == 1:
                    nren += 1
                elif line_cnt[l] == 2:
                    nren -= 1

    st_mid = np.empty(max_len + 2, np.int32)
    st_entry = np.empty(max_len + 2, np.int8)
    st_opt = np.zeros(max_len + 2, np.int8)
    st_w = np.empty(max_len + 2, np.int64)
    st_mid[p] = path[p]
    st_entry[p] = path_entry[p]
    st_w[p] = w0

    count = 1
    c = cls[path[p]]
    if c >= 0:
        hist[c, ((w0 % 48) + 48) % 48, p] += 1
        if use_ren:
            ren_hist[c, nren, p] += 1
    truncated = False
    stopped = False
    if count >= budget:
        return count, truncated, True

    depth = p
    while depth >= p:
        m = st_mid[depth]
        ent = st_entry[depth]
        if depth == max_len:
            if not truncated:
                for o in range(4):
                    n = nxt[m, o]
                    if n >= 0 and visited[n] == 0 and (ent < 0 or nxt_exit[m, o] != ent):
                        truncated = True
                        break
            found = -1
        else:
            found = -1
            o = st_opt[depth]
            while o < 4:
                n = nxt[m, o]
                if n >= 0 and visited[n] == 0 and (ent < 0 or nxt_exit[m, o] != ent):
                    found = o
                    break
                o += 1
        if found < 0:
            # backtrack
            if depth == p:
                break
            visited[m] = 0
            if use_ren:
                l = line_id[m]
                if l >= 0:
                    line_cnt[l] -= 1
                    if line_cnt[l] == 1:
                        nren += 1
                    elif line_cnt[l] == 0:
                        nren -= 1
            depth -= 1
            continue
        st_opt[depth] = found + 1
        n = nxt[m, found]
        depth += 1
        st_mid[depth] = n
        st_entry[depth] = nxt_entry[m, found]
        st_opt[depth] = 0
        w = st_w[depth - 1] + nxt_turn[m, found]
        st_w[depth] = w
        visited[n] = 1
        if use_ren:
            l = line_id[n]
            if l >= 0:
                line_cnt[l] += 1
                if line_cnt[l] == 1:
                    nren += 1
                elif line_cnt[l] == 2:
                    nren -= 1
        c = cls[n]
        if c >= 0:
            hist[c, ((w % 48) + 48) % 48, depth] += 1
            if use_ren:
                ren_hist[c, nren, depth] += 1
        count += 1
        if count >= budget:
            stopped = True
            break
    return count, truncated, stopped


# -- exact evaluation -------------------------------------------------------------

def _zeta_matrix() -> np.ndarray:
    P = np.zeros((48, 16), np.int64)
    for k in range(48):
        P[k] = cyclo.zeta(k).num
    return P


_ZETA_P = _zeta_matrix()


def _power_table(x: CycNum, L: int):
    """x^0..x^L as integer numerator rows over one common denominator."""
    pw = [CycNum(1)]
    for _ in range(L):
        pw.append(pw[-1] * x)
    den = 1
    for p in pw:
        den = lcm(den, p.den)
    rows = np.empty((L + 1, 16), dtype=object)
    for l, p in enumerate(pw):
        f = den // p.den
        rows[l] = [v * f for v in p.num]
    return rows, den


_POWER_CACHE: dict = {}


def power_table(x: CycNum, L: int):
    key = (x, L)
    if key not in _POWER_CACHE:
        if len(_POWER_CACHE) > 64:
            _POWER_CACHE.clear()
        _POWER_CACHE[key] = _power_table(x, L)
    return _POWER_CACHE[key]


def evaluate_histogram(counts: np.ndarray, x: CycNum, phase_exp: int = 0) -> CycNum:
    """Sum over (w, l) of counts[w, l] * zeta^(-phase_exp*w) * x^l, exactly."""
    counts = np.asarray(counts)
    L = counts.shape[1] - 1
    if not counts.any():
        return CycNum(0)
    if phase_exp % 48 == 0:
        per_len = counts.sum(axis=0)
        coeffs = np.zeros((L + 1, 16), dtype=object)
        coeffs[:, 0] = [int(v) for v in per_len]
    else:
        perm = [(-phase_exp * w) % 48 for w in range(48)]
        # row w of counts contributes zeta^perm[w]
        C = np.zeros((L + 1, 16), np.int64)
        for w in range(48):
            row = counts[w]
            if row.any():
                C += np.outer(row, _ZETA_P[perm[w]])
        coeffs = C.astype(object)
    rows, den = power_table(x, L)
    T = coeffs.T.dot(rows)  # [16,16]: sum_l c_l[a] * X_l[b]
    out = [0] * 31
    for a in range(16):
        for b in range(16):
            v = T[a, b]
            if v:
                out[a + b] += int(v)
    return CycNum(out, den)


# -- spec / result ------------------------------------------------------------------

@dataclass
class EnumSpec:
    domain: Domain
    start: tuple
    max_length: int
    endpoint_filter: Callable | None = None
    accumulators: tuple = (WEIGHT_SUM,)
    x: CycNum | None = None
    sigma: Fraction = Fraction(5, 8)
    renewal_lines: int = 0  # number of renewal lines i = 0..n-1 to track
    collect_cap: int = 100_000
    budget: int = DEFAULT_BUDGET
    filter_tag: str = "any"  # stable description of endpoint_filter for cache keys

    def __post_init__(self):
        if self.max_length < 0:
            raise EnumerationError("max_length must be nonnegative")
        self.start = check_mid(self.start)
        if not self.domain.contains(self.start):
            raise EnumerationError(f"start {tuple(self.start)} is outside {self.domain.kind}")
        if self.x is None:
            self.x = cyclo.constant("x_c")
        self.sigma = Fraction(self.sigma)

    def key(self) -> str:
        return json.dumps(
            {
                "domain": self.domain.to_json(),
                "start": list(self.start),
                "L": self.max_length,
                "filter": self.filter_tag,
                "ren": self.renewal_lines,
            },
            sort_keys=True,
        )


@dataclass
class EnumResult:
    spec: EnumSpec
    classes: list  # endpoint class -> MidEdge (or None for the aggregate class)
    hist: np.ndarray  # [K,48,L+1]
    ren_hist: np.ndarray | None
    walks_visited: int
    truncated: bool
    walks: list | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    # exact accumulator outputs

    def weight_sum(self, x: CycNum | None = None) -> CycNum:
        x = self.spec.x if x is None else x
        return evaluate_histogram(self.hist.sum(axis=0), x)

    def per_endpoint(self, x: CycNum | None = None) -> dict:
        x = self.spec.x if x is None else x
        out = {}
        for c, m in enumerate(self.classes):
            h = self.hist[c]
            if h.any():
                out[m] = evaluate_histogram(h, x)
        return out

    def phase_sums(self, x: CycNum | None = None, sigma=None) -> dict:
        x = self.spec.x if x is None else x
        e = cyclo.phase_exponent(self.spec.sigma if sigma is None else sigma)
        out = {}
        for c, m in enumerate(self.classes):
            h = self.hist[c]
            if h.any():
                out[m] = evaluate_histogram(h, x, e)
        return out

    def counts_by_length(self) -> list[int]:
        return [int(v) for v in self.hist.sum(axis=(0, 1))]

    def renewal_weights(self, x: CycNum | None = None, per_endpoint: bool = False):
        """N -> exact weight (optionally per endpoint) from the renewal histogram."""
        if self.ren_hist is None:
            raise EnumerationError("renewal counting was not requested")
        x = self.spec.x if x is None else x
        if per_endpoint:
            out = {}
            for c, m in enumerate(self.classes):
                h = self.ren_hist[c]
                if h.any():
                    out[m] = {int(N): evaluate_histogram(h[N:N + 1], x) for N in range(h.shape[0]) if h[N].any()}
            return out
        h = self.ren_hist.sum(axis=0)
        return {int(N): evaluate_histogram(h[N:N + 1], x) for N in range(h.shape[0]) if h[N].any()}

    def to_json(self) -> dict:
        acc = self.spec.accumulators
        data = {
            "spec": json.loads(self.spec.key()),
            "walks_visited": self.walks_visited,
            "truncated": self.truncated,
            "counts_by_length": self.counts_by_length(),
        }
        if WEIGHT_SUM in acc:
            data["weight_sum"] = self.weight_sum().to_json()
        if PER_ENDPOINT in acc:
            data["per_endpoint"] = [[list(m), v.to_json()] for m, v in sorted(self.per_endpoint().items())]
        if PHASE_SUM in acc:
            data["phase_sums"] = [[list(m), v.to_json()] for m, v in sorted(self.phase_sums().items())]
        if RENEWAL in acc and self.ren_hist is not None:
            data["renewal"] = [[N, v.to_json()] for N, v in sorted(self.renewal_weights().items())]
        if self.walks is not None:
            data["walks"] = [[list(m) for m in w] for w in self.walks]
        return data


# -- driver ---------------------------------------------------------------------------

class _Prepared:
    def __init__(self, spec: EnumSpec):
        self.spec = spec
        ms = region_mids(spec.domain, spec.start, spec.max_length)
        self.graph = build_graph(ms)
        g = self.graph
        per_mid = PER_ENDPOINT in spec.accumulators or PHASE_SUM in spec.accumulators
        flt = spec.endpoint_filter
        cls = np.full(g.size, -1, np.int32)
        classes = []
        for i, m in enumerate(g.mids):
            if flt is None or flt(m):
                if per_mid:
                    cls[i] = len(classes)
                    classes.append(m)
                else:
                    cls[i] = 0
        if not per_mid:
            classes = [None]
        self.cls = cls
        self.classes = classes
        nl = spec.renewal_lines
        line_id = np.full(g.size, -1, np.int32)
        if nl:
            for idx, m in enumerate(g.mids):
                for i in range(nl):
                    if renewal_line_value(m, i) == 0:
                        line_id[idx] = i
        self.line_id = line_id
        self.nlines = nl
        self.use_ren = RENEWAL in spec.accumulators and nl > 0

    def new_buffers(self):
        L = self.spec.max_length
        K = len(self.classes)
        hist = np.zeros((K, 48, L + 1), np.int64)
        ren = np.zeros((K, self.nlines + 1, L + 1) if self.use_ren else (1, 1, 1), np.int64)
        return hist, ren

    def run(self, path_idx, path_entry, w0, max_len, hist, ren, budget):
        g = self.graph
        return _dfs_kernel(
            g.nxt, g.nxt_exit, g.nxt_entry, g.nxt_turn, self.cls, self.line_id, self.nlines,
            np.asarray(path_idx, np.int32), np.asarray(path_entry, np.int8), np.int64(w0),
            max_len, hist, ren, self.use_ren, np.int64(budget),
        )

    def root(self):
        return [self.graph.index[self.spec.start]], [-1]


def _finish(prep: _Prepared, hist, ren, visited, truncated, stopped) -> EnumResult:
    spec = prep.spec
    if stopped or visited > spec.budget:
        raise ResourceError(f"walk budget {spec.budget} exhausted after {visited} walks")
    walks = None
    if COLLECT in spec.accumulators:
        walks = []
        for w in iter_walks(prep.graph, spec.start, spec.max_length):
            if spec.endpoint_filter is None or spec.endpoint_filter(w[-1]):
                walks.append(Walk(w, validate=False))
                if len(walks) > spec.collect_cap:
                    raise ResourceError(f"walk collector cap {spec.collect_cap} exceeded")
    return EnumResult(spec, prep.classes, hist, ren if prep.use_ren else None, int(visited), bool(truncated), walks)


def enumerate_walks(spec: EnumSpec) -> EnumResult:
    """Visit every SAW from spec.start inside spec.domain with length <= max_length."""
    prep = _Prepared(spec)
    hist, ren = prep.new_buffers()
    path, entry = prep.root()
    visited, truncated, stopped = prep.run(path, entry, 0, spec.max_length, hist, ren, spec.budget)
    return _finish(prep, hist, ren, visited, truncated, stopped)


def parallel_enumerate(spec: EnumSpec, workers: int, split_depth: int | None = None) -> EnumResult:
    """Same result as enumerate_walks, with the search tree split over threads."""
    if workers < 1:
        raise EnumerationError("workers must be positive")
    if workers == 1:
        return enumerate_walks(spec)
    prep = _Prepared(spec)
    L = spec.max_length
    d = min(L, split_depth if split_depth is not None else 4)
    hist, ren = prep.new_buffers()
    path, entry = prep.root()
    visited = 0
    truncated = False
    if d == 0:
        v, t, s = prep.run(path, entry, 0, L, hist, ren, spec.budget)
        return _finish(prep, hist, ren, v, t, s)
    # shallow part: all walks shorter than d
    v, _, s = prep.run(path, entry, 0, d - 1, hist, ren, spec.budget)
    visited += v
    stopped = bool(s)
    prefixes = list(_iter_index_paths(prep.graph, prep.graph.index[spec.start], d, only_depth=d))

    def work(chunk):
        h, r = prep.new_buffers()
        tot, trunc, stop = 0, False, False
        for idx_path, ent_path, w0 in chunk:
            a, b, c = prep.run(idx_path, ent_path, w0, L, h, r, spec.budget)
            tot += a
            trunc |= bool(b)
            stop |= bool(c)
        return h, r, tot, trunc, stop

    chunks = [prefixes[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(work, chunks))
    for h, r, tot, trunc, stop in results:
        hist += h
        ren += r
        visited += tot
        truncated |= trunc
        stopped |= stop
    return _finish(prep, hist, ren, visited, truncated, stopped)


# -- pure-python traversal ---------------------------------------------------------------

def _iter_index_paths(g: RegionGraph, start_idx: int, max_len: int, only_depth: int | None = None):
    """Yield (index path, entry path, winding) in lexicographic neighbour order."""
    path = [start_idx]
    ent = [-1]
    on = {start_idx}
    wind = [0]

    def rec():
        depth = len(path) - 1
        if only_depth is None or depth == only_depth:
            yield list(path), list(ent), wind[-1]
        if depth == max_len:
            return
        m = path[-1]
        e = ent[-1]
        for o in range(4):
            n = int(g.nxt[m, o])
            if n < 0 or n in on or (e >= 0 and g.nxt_exit[m, o] == e):
                continue
            path.append(n)
            ent.append(int(g.nxt_entry[m, o]))
            wind.append(wind[-1] + int(g.nxt_turn[m, o]))
            on.add(n)
            yield from rec()
            on.discard(n)
            path.pop()
            ent.pop()
            wind.pop()

    yield from rec()


def iter_walks(g: RegionGraph, start, max_len: int) -> Iterator[tuple]:
    """Every walk of length <= max_len from start in g, as a tuple of MidEdges."""
    mids = g.mids
    for p, _, _ in _iter_index_paths(g, g.index[MidEdge(*start)], max_len):
        yield tuple(mids[i] for i in p)


def walks_in(domain: Domain, start, max_len: int, endpoint_filter=None) -> Iterator[Walk]:
    g = build_graph(region_mids(domain, start, max_len))
    for w in iter_walks(g, start, max_len):
        if endpoint_filter is None or endpoint_filter(w[-1]):
            yield Walk(w, validate=False)


# -- counting ----------------------------------------------------------------------------

def count_saws(n: int, cap: int = COUNT_SAWS_CAP, budget: int = DEFAULT_BUDGET) -> int:
    """c_n: SAWs of exactly n steps from the origin mid-edge in the whole lattice."""
    if n < 0:
        raise EnumerationError("n must be nonnegative")
    if n > cap:
        raise ResourceError(f"n={n} exceeds the configured cap {cap}")
    res = enumerate_walks(EnumSpec(plane(), (0, 0), n, budget=budget))
    return res.counts_by_length()[n]


def count_saws_table(n_max: int, cap: int = COUNT_SAWS_CAP, workers: int = 1) -> list[int]:
    if n_max > cap:
        raise ResourceError(f"n={n_max} exceeds the configured cap {cap}")
    spec = EnumSpec(plane(), (0, 0), n_max)
    res = parallel_enumerate(spec, workers) if workers > 1 else enumerate_walks(spec)
    return res.counts_by_length()


def brute_force_walks(start, max_len: int, contains=None) -> set:
    """Generate-and-filter oracle: all adjacency sequences, kept when Walk accepts them."""
    out = set()
    frontier = [(MidEdge(*start),)]
    if contains is not None and not contains(frontier[0][0]):
        return out
    for _ in range(max_len + 1):
        nxt = []
        for seq in frontier:
            if Walk.is_valid(seq) and (contains is None or all(contains(m) for m in seq)):
                out.add(seq)
                for p, _ in neighbors(seq[-1]):
                    nxt.append(seq + (p,))
        frontier = nxt
    return out


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
