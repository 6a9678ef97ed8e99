"""
Kernel Table Cache

Holds tabulated kernel values in memory and, when a cache directory is
configured, persists the real-ray tables to disk between runs.
"""

import os
import json
import time
import struct
import hashlib
import threading
import logging

import numpy as np
from cachetools import LRUCache

from errors import ValidationError
from settings import CACHE_DIR

logger = logging.getLogger("kernel_cache")

# Header of a table file: number of (x, e(x)) pairs as little-endian uint64
HEADER = struct.Struct('<Q')


def table_key(p, q, r, d, tol):
    """Cache key of a real-ray table; d and tol are rounded so equal runs share files."""
    return f"p{p}-q{q}-r{r}-d{float(d):.12g}-tol{float(tol):.3g}"


def write_table(path, x, y):
    """
    Write a table in the binary format: 8-byte count header, then
    little-endian f64 pairs (x_i, y_i).
    """
    x = np.asarray(x, dtype='<f8')
    y = np.asarray(y, dtype='<f8')
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(f"Table arrays must be 1-d and of equal length, got {x.shape} and {y.shape}")
    pairs = np.empty(2 * x.size, dtype='<f8')
    pairs[0::2] = x
    pairs[1::2] = y
    with open(path, 'wb') as f:
        f.write(HEADER.pack(x.size))
        f.write(pairs.tobytes())


def read_table(path):
    """Read a table written by write_table; returns (x, y) float arrays."""
    with open(path, 'rb') as f:
        header = f.read(HEADER.size)
        if len(header) != HEADER.size:
            raise ValidationError(f"Truncated kernel table header in {path}")
        (count,) = HEADER.unpack(header)
        payload = f.read()
    if len(payload) != 16 * count:
        raise ValidationError(f"Kernel table {path} declares {count} pairs but holds {len(payload) // 16}")
    pairs = np.frombuffer(payload, dtype='<f8')
    return pairs[0::2].astype(float), pairs[1::2].astype(float)


class KernelTableStore:
    """
    Persists real-ray kernel tables.

    This class handles:
    - Writing and reading tables in the binary pair format
    - Keeping a JSON index of stored tables
    - Serialising concurrent access with a lock
    """

    def __init__(self, cache_dir):
        """
        Initialize the store.

        Args:
            cache_dir: directory for table files and index.json
        """
        self.cache_dir = cache_dir
        self.index = {}
        self.lock = threading.Lock()

        os.makedirs(cache_dir, exist_ok=True)
        self._load_index()

        logger.info(f"Kernel table store at {cache_dir} with {len(self.index)} tables")

    def _file_for(self, key):
        digest = hashlib.sha1(key.encode()).hexdigest()[:16]
        return os.path.join(self.cache_dir, f"kernel-{digest}.bin")

    def load(self, key):
        """
        Get a stored table.

        Returns:
            (x, y) arrays, or None when the key is unknown or the file is unreadable
        """
        with self.lock:
            entry = self.index.get(key)
        if entry is None:
            return None
        try:
            x, y = read_table(entry['file'])
        except (OSError, ValidationError) as e:
            logger.warning(f"Discarding unreadable kernel table {entry['file']}: {e}")
            with self.lock:
                self.index.pop(key, None)
                self._save_index()
            return None
        logger.debug(f"Loaded kernel table {key} ({x.size} points)")
        return x, y

    def store(self, key, x, y):
        """Write a table and record it in the index."""
        path = self._file_for(key)
        with self.lock:
            try:
                write_table(path, x, y)
                self.index[key] = {'file': path, 'points': int(np.size(x)), 'created': time.time()}
                self._save_index()
                logger.info(f"Stored kernel table {key} ({np.size(x)} points)")
            except OSError as e:
                logger.error(f"Error writing kernel table {key}: {str(e)}")

    def _save_index(self):
        """Save the index to disk"""
        try:
            with open(os.path.join(self.cache_dir, 'index.json'), 'w') as f:
                json.dump({'tables': self.index, 'timestamp': time.time()}, f, indent=1, sort_keys=True)
        except OSError as e:
            logger.error(f"Error saving kernel table index: {str(e)}")

    def _load_index(self):
        """Load the index, dropping entries whose files have disappeared"""
        index_file = os.path.join(self.cache_dir, 'index.json')
        if not os.path.exists(index_file):
            logger.debug("No kernel table index found")
            return
        try:
            with open(index_file, 'r') as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            logger.error(f"Error loading kernel table index: {str(e)}")
            return

        valid = {}
        for key, entry in data.get('tables', {}).items():
            if os.path.exists(entry.get('file', '')):
                valid[key] = entry
            else:
                logger.warning(f"Kernel table file for {key} not found, skipping")
        with self.lock:
            self.index = valid


class RayTableCache:
    """In-memory LRU of per-direction kernel tables, safe for concurrent use."""

    def __init__(self, maxsize=64):
        self.tables = LRUCache(maxsize=maxsize)
        self.lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_or_build(self, key, builder):
        """Return the cached table for key, building it (outside the lock) on a miss."""
        with self.lock:
            table = self.tables.get(key)
            if table is not None:
                self.hits += 1
                return table
            self.misses += 1
        table = builder()
        with self.lock:
            self.tables[key] = table
        return table

    def clear(self):
        with self.lock:
            self.tables.clear()

    def stats(self):
        with self.lock:
            return {'entries': len(self.tables), 'hits': self.hits, 'misses': self.misses}


_store = None
_store_lock = threading.Lock()


def default_store():
    """The process-wide store for STOKES_SUMMA_CACHE_DIR, or None when disk caching is off."""
    global _store
    if not CACHE_DIR:
        return None
    with _store_lock:
        if _store is None or _store.cache_dir != CACHE_DIR:
            _store = KernelTableStore(CACHE_DIR)
        return _store
