"""On-disk cache for prime and character tables.

Files are keyed by a content hash of the generation parameters plus a
format version, so changing either invalidates old entries.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

CACHE_ENV = "LFZEROS_CACHE_DIR"
FORMAT_VERSION = 1

# keys touched by this process, reported in run manifests
USED_KEYS: set = set()


def cache_dir() -> Path:
    root = os.environ.get(CACHE_ENV) or os.path.join(Path.home(), ".cache", "lfzeros")
    return Path(root)


def cache_key(kind: str, **params) -> str:
    blob = json.dumps({"kind": kind, "v": FORMAT_VERSION, **params}, sort_keys=True)
    return f"{kind}-v{FORMAT_VERSION}-" + hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_array(key: str) -> np.ndarray | None:
    USED_KEYS.add(key)
    path = cache_dir() / f"{key}.npy"
    if not path.exists():
        return None
    try:
        return np.load(path, allow_pickle=False)
    except (OSError, ValueError):
        return None


def store_array(key: str, arr: np.ndarray) -> None:
    USED_KEYS.add(key)
    d = cache_dir()
    try:
        d.mkdir(parents=True, exist_ok=True)
        tmp = d / f"{key}.{os.getpid()}.tmp.npy"
        np.save(tmp, arr, allow_pickle=False)
        os.replace(tmp, d / f"{key}.npy")
    except OSError:
        # an unwritable cache only costs recomputation
        pass
