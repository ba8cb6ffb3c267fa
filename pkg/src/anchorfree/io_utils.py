"""Binary dense-matrix files, config hashing, and worker-count policy."""

from __future__ import annotations

import hashlib
import json
import os
import struct

import numpy as np

from .errors import CorpusFormatError

__all__ = ["save_dense", "load_dense", "config_hash", "worker_count"]

_DENSE_MAGIC = b"ANCM"


def save_dense(mat, path, provenance=""):
    """Dense row-major little-endian f64 matrix with a provenance header
    (magic, 64-byte padded config hash, rows, cols)."""
    mat = np.asarray(mat, dtype="<f8")
    tag = provenance.encode("ascii")[:64].ljust(64, b"\0")
    with open(path, "wb") as fh:
        fh.write(_DENSE_MAGIC)
        fh.write(tag)
        fh.write(struct.pack("<QQ", mat.shape[0], mat.shape[1]))
        fh.write(np.ascontiguousarray(mat).tobytes())


def load_dense(path):
    with open(path, "rb") as fh:
        if fh.read(4) != _DENSE_MAGIC:
            raise CorpusFormatError(f"{path}: not a dense matrix file")
        provenance = fh.read(64).rstrip(b"\0").decode("ascii")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(8 * rows * cols), dtype="<f8")
        if data.size != rows * cols:
            raise CorpusFormatError(f"{path}: truncated payload")
    return data.reshape(rows, cols).copy(), provenance


def config_hash(config):
    """Stable short hash of a JSON-serializable run configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def worker_count():
    """Worker cap from ANCHORFREE_THREADS (default 1, minimum 1)."""
    raw = os.environ.get("ANCHORFREE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
