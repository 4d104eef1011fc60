"""Enumeration runner with an in-process memo and an optional JSON-lines disk cache.

Entries hold the sparse integer histograms of an EnumResult, keyed by a
sha256 of the enumeration spec and a code-version tag.  Exact values are
always recomputed from the histograms, so a cache hit cannot change output.
"""

from __future__ import annotations

import fcntl
import hashlib
import json
import os
import threading
from pathlib import Path

import numpy as np

from . import __version__
from .enumerator import (
    COLLECT,
    DEFAULT_BUDGET,
    EnumResult,
    EnumSpec,
    enumerate_walks,
    parallel_enumerate,
)
from .hexlattice import MidEdge

CACHE_FORMAT = 1
VERSION_TAG = f"{__version__}/{CACHE_FORMAT}"
CACHE_FILE = "enum-cache.jsonl"


def spec_hash(spec: EnumSpec, version: str = VERSION_TAG) -> str:
    payload = json.dumps(
        {"spec": json.loads(spec.key()), "acc": sorted(spec.accumulators), "version": version},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()


def _sparse(a: np.ndarray) -> list:
    idx = np.argwhere(a)
    return [[*map(int, i), int(a[tuple(i)])] for i in idx]


def _dense(entries, shape) -> np.ndarray:
    a = np.zeros(shape, np.int64)
    for *i, v in entries:
        a[tuple(i)] = v
    return a


class DiskCache:
    """Append-only JSON-lines store.  Later lines win; other versions are ignored."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.path = self.dir / CACHE_FILE
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _scan(self):
        if not self.path.exists():
            return
        with open(self.path) as fh:
            fcntl.flock(fh, fcntl.LOCK_SH)
            try:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        yield json.loads(line)
                    except json.JSONDecodeError:
                        continue
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def get(self, key: str):
        found = None
        for rec in self._scan():
            if rec.get("key") == key and rec.get("version") == VERSION_TAG:
                found = rec
        if found is None:
            self.misses += 1
        else:
            self.hits += 1
        return found

    def put(self, key: str, record: dict):
        record = dict(record, key=key, version=VERSION_TAG)
        line = json.dumps(record, sort_keys=True) + "\n"
        with self._lock, open(self.path, "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def entries(self) -> list[dict]:
        return [
            {"key": r["key"], "version": r.get("version"), "walks_visited": r.get("walks_visited")}
            for r in self._scan()
        ]

    def clear(self):
        with self._lock:
            if self.path.exists():
                self.path.unlink()


def _record(res: EnumResult) -> dict:
    return {
        "classes": [None if m is None else list(m) for m in res.classes],
        "hist_shape": list(res.hist.shape),
        "hist": _sparse(res.hist),
        "ren_shape": None if res.ren_hist is None else list(res.ren_hist.shape),
        "ren": None if res.ren_hist is None else _sparse(res.ren_hist),
        "walks_visited": res.walks_visited,
        "truncated": res.truncated,
    }


def _from_record(spec: EnumSpec, rec: dict) -> EnumResult:
    classes = [None if m is None else MidEdge(*m) for m in rec["classes"]]
    hist = _dense(rec["hist"], rec["hist_shape"])
    ren = None if rec["ren_shape"] is None else _dense(rec["ren"], rec["ren_shape"])
    return EnumResult(spec, classes, hist, ren, rec["walks_visited"], rec["truncated"])


class Runner:
    """Runs EnumSpecs with a worker count, a walk budget and optional caching."""

    def __init__(self, workers: int = 1, budget: int = DEFAULT_BUDGET, cache_dir=None, memo: bool = True):
        self.workers = max(1, int(workers))
        self.budget = int(budget)
        self.disk = DiskCache(cache_dir) if cache_dir else None
        self._memo = {} if memo else None
        self._lock = threading.Lock()

    def run(self, spec: EnumSpec) -> EnumResult:
        if spec.budget == DEFAULT_BUDGET:
            spec.budget = self.budget
        if COLLECT in spec.accumulators or spec.endpoint_filter is not None and spec.filter_tag == "any":
            return self._compute(spec)
        key = spec_hash(spec)
        if self._memo is not None and key in self._memo:
            return self._memo[key]
        res = None
        if self.disk is not None:
            rec = self.disk.get(key)
            if rec is not None:
                res = _from_record(spec, rec)
        if res is None:
            res = self._compute(spec)
            if self.disk is not None:
                self.disk.put(key, _record(res))
        if self._memo is not None:
            with self._lock:
                self._memo[key] = res
        return res

    def _compute(self, spec: EnumSpec) -> EnumResult:
        if self.workers > 1:
            return parallel_enumerate(spec, self.workers)
        return enumerate_walks(spec)


_DEFAULT = Runner()


def default_runner() -> Runner:
    return _DEFAULT
