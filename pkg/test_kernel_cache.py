#!/usr/bin/env python3
"""
Tests for the on-disk kernel table store and the in-memory ray table cache
"""

import os
import sys
import json
import threading

import numpy as np
import pytest

from errors import ValidationError
from kernel_cache import HEADER, KernelTableStore, RayTableCache, read_table, table_key, write_table


def test_table_file_layout(tmp_path):
    path = tmp_path / "table.bin"
    write_table(path, [1.0, 2.0, 3.0], [0.5, 0.25, 0.125])
    raw = path.read_bytes()
    assert len(raw) == HEADER.size + 3 * 16
    assert HEADER.unpack(raw[:HEADER.size]) == (3,)
    x, y = read_table(path)
    assert np.array_equal(x, [1.0, 2.0, 3.0])
    assert np.array_equal(y, [0.5, 0.25, 0.125])


def test_truncated_table(tmp_path):
    path = tmp_path / "table.bin"
    write_table(path, [1.0, 2.0], [3.0, 4.0])
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValidationError):
        read_table(path)


def test_mismatched_arrays(tmp_path):
    with pytest.raises(ValidationError):
        write_table(tmp_path / "bad.bin", [1.0, 2.0], [1.0])


def test_table_key_rounds():
    assert table_key(3, 0, 0, 0.0, 1e-10) == table_key(3, 0, 0, 0.0, 1.00000001e-10)
    assert table_key(3, 0, 0, 0.0, 1e-10) != table_key(3, 1, 0, 0.0, 1e-10)


def test_store_persists_index(tmp_path):
    store = KernelTableStore(str(tmp_path))
    key = table_key(3, 0, 0, 0.0, 1e-10)
    store.store(key, np.geomspace(1e-3, 10.0, 5), np.arange(5.0))
    with open(tmp_path / "index.json") as f:
        assert key in json.load(f)["tables"]

    reopened = KernelTableStore(str(tmp_path))
    x, y = reopened.load(key)
    assert np.array_equal(y, np.arange(5.0))
    assert reopened.load("missing") is None


def test_store_discards_unreadable_table(tmp_path):
    store = KernelTableStore(str(tmp_path))
    store.store("k", [1.0], [2.0])
    with open(store.index["k"]["file"], "wb") as f:
        f.write(b"\x00")
    assert store.load("k") is None
    assert "k" not in store.index


def test_store_skips_missing_files(tmp_path):
    store = KernelTableStore(str(tmp_path))
    store.store("k", [1.0], [2.0])
    os.remove(store.index["k"]["file"])
    assert KernelTableStore(str(tmp_path)).index == {}


def test_ray_table_cache_builds_once():
    cache = RayTableCache(maxsize=4)
    calls = []

    def builder():
        calls.append(1)
        return "table"

    threads = [threading.Thread(target=cache.get_or_build, args=(0.1, builder)) for _ in range(4)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert cache.get_or_build(0.1, builder) == "table"
    stats = cache.stats()
    assert stats["entries"] == 1
    assert stats["hits"] + stats["misses"] == 5
    assert stats["misses"] == len(calls)


def test_ray_table_cache_evicts():
    cache = RayTableCache(maxsize=2)
    for key in (1, 2, 3):
        cache.get_or_build(key, lambda key=key: key)
    assert cache.stats()["entries"] == 2
    cache.clear()
    assert cache.stats()["entries"] == 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__]))
