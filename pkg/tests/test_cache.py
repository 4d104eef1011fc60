import json

import numpy as np

from hexwalk import cache
from hexwalk.cache import DiskCache, Runner, spec_hash
from hexwalk.domains import strip, triangle
from hexwalk.enumerator import PER_ENDPOINT, RENEWAL, EnumSpec


def _spec(k=1):
    return EnumSpec(triangle(k), (0, 0), 40, accumulators=(PER_ENDPOINT, RENEWAL), renewal_lines=k + 1)


def test_hash_stable_and_distinct():
    assert spec_hash(_spec()) == spec_hash(_spec())
    assert spec_hash(_spec(1)) != spec_hash(_spec(2))
    assert spec_hash(_spec(), "other") != spec_hash(_spec())


def test_disk_round_trip(tmp_path):
    r1 = Runner(cache_dir=tmp_path)
    a = r1.run(_spec())
    assert r1.disk.misses == 1
    r2 = Runner(cache_dir=tmp_path)
    b = r2.run(_spec())
    assert r2.disk.hits == 1
    assert np.array_equal(a.hist, b.hist) and np.array_equal(a.ren_hist, b.ren_hist)
    assert a.per_endpoint() == b.per_endpoint()
    assert a.renewal_weights() == b.renewal_weights()


def test_memo_returns_same_object():
    r = Runner()
    assert r.run(_spec()) is r.run(_spec())


def test_other_version_ignored(tmp_path, monkeypatch):
    Runner(cache_dir=tmp_path).run(EnumSpec(strip(1), (0, 0), 8))
    monkeypatch.setattr(cache, "VERSION_TAG", "0.0.0/0")
    r = Runner(cache_dir=tmp_path)
    r.run(EnumSpec(strip(1), (0, 0), 8))
    assert r.disk.hits == 0 and r.disk.misses == 1


def test_list_and_clear(tmp_path):
    d = DiskCache(tmp_path)
    d.put("abc", {"walks_visited": 3})
    with open(d.path, "a") as fh:
        fh.write("not json\n")
    assert [e["key"] for e in d.entries()] == ["abc"]
    assert json.loads(d.path.read_text().splitlines()[0])["key"] == "abc"
    d.clear()
    assert d.entries() == []
