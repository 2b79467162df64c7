import os
import threading

import pytest

import labdash.cache as cache_module
from labdash.cache import CacheError, ResponseCache


@pytest.fixture
def cache(tmp_path):
    return ResponseCache(tmp_path / "cache")


def test_round_trip_identical_bytes(cache):
    payload = b'{"results": [1, 2, 3]}'
    cache.put(("p1", "c1"), payload)
    got = cache.get(("p1", "c1"))
    assert got is not None
    assert got[0] == payload
    assert got[1] is not None  # fetched_at recorded


def test_get_before_put_is_miss(cache):
    assert cache.get(("p1", "c1")) is None


def test_last_write_wins(cache):
    cache.put(("p1", "c1"), b"first")
    cache.put(("p1", "c1"), b"second")
    assert cache.get(("p1", "c1"))[0] == b"second"


def test_header_key_separate_from_concept_keys(cache):
    cache.put(("p1", None), b"header")
    cache.put(("p1", "c1"), b"obs")
    assert cache.get(("p1", None))[0] == b"header"
    assert cache.get(("p1", "c1"))[0] == b"obs"


def test_keys_are_isolated_between_patients(cache):
    cache.put(("p1", "c1"), b"one")
    assert cache.get(("p2", "c1")) is None


def test_weird_key_characters_do_not_escape_cache_dir(tmp_path):
    cache = ResponseCache(tmp_path / "cache")
    cache.put(("../evil", "a/b"), b"x")
    assert cache.get(("../evil", "a/b"))[0] == b"x"
    escaped = tmp_path / "evil__a"
    assert not escaped.exists()
    for path in (tmp_path / "cache").iterdir():
        assert path.parent == tmp_path / "cache"


def test_crash_between_write_and_rename_leaves_old_entry(cache, monkeypatch):
    cache.put(("p1", "c1"), b"stable")

    def explode(src, dst):
        raise OSError("simulated crash")

    monkeypatch.setattr(cache_module.os, "replace", explode)
    with pytest.raises(CacheError):
        cache.put(("p1", "c1"), b"torn write")
    monkeypatch.undo()

    # the old complete entry survives; no torn bytes, no temp litter
    assert cache.get(("p1", "c1"))[0] == b"stable"
    leftovers = [p for p in os.listdir(cache.root) if ".tmp" in p]
    assert leftovers == []


def test_crash_before_any_entry_reads_as_miss(cache, monkeypatch):
    monkeypatch.setattr(cache_module.os, "replace", lambda s, d: (_ for _ in ()).throw(OSError("boom")))
    with pytest.raises(CacheError):
        cache.put(("p1", "c1"), b"never lands")
    monkeypatch.undo()
    assert cache.get(("p1", "c1")) is None


def test_corrupt_envelope_raises_cache_error_not_miss(cache):
    cache.put(("p1", "c1"), b"ok")
    victim = next(p for p in cache.root.iterdir())
    victim.write_bytes(b"\x00 this is not json")
    with pytest.raises(CacheError):
        cache.get(("p1", "c1"))


def test_concurrent_writers_single_key_keeps_entry_parseable(cache):
    # N threads hammer one key; afterwards the entry must be one of the
    # complete payloads, never interleaved garbage.
    payloads = [f"payload-{i}".encode() * 200 for i in range(8)]
    threads = [threading.Thread(target=cache.put, args=(("p1", "c1"), p)) for p in payloads]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    got = cache.get(("p1", "c1"))[0]
    assert got in payloads
