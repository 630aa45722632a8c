"""Checkpoint container: length-prefixed JSON manifest + raw float32 payload.

Layout::

    [8 bytes]  little-endian uint64, byte length of the manifest
    [manifest] UTF-8 JSON; ``format_version`` is the first key
    [payload]  concatenated little-endian float32 arrays

Array offsets in the manifest are relative to the payload start.  Values are
stored as float32 regardless of the in-memory float64 precision.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from gimtp.errors import ContractError
from gimtp.nn.params import ParameterStore

FORMAT_VERSION = 1


def save_checkpoint(store: ParameterStore, path, meta: dict | None = None):
    entries = []
    payload = bytearray()

    def put(name: str, arr: np.ndarray):
        raw = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        entries.append(
            {
                "name": name,
                "shape": list(arr.shape),
                "dtype": "<f4",
                "offset": len(payload),
            }
        )
        payload.extend(raw)

    for name, p in store.items():
        put(f"param/{name}", p.data)
    for name, m, v in store.moment_arrays():
        put(f"adam_m/{name}", m)
        put(f"adam_v/{name}", v)

    manifest = {
        "format_version": FORMAT_VERSION,
        "step": store.step,
        "meta": meta or {},
        "arrays": entries,
    }
    blob = json.dumps(manifest, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(bytes(payload))


class Checkpoint:
    """Parsed checkpoint: named float64 arrays plus manifest metadata."""

    def __init__(self, arrays: dict[str, np.ndarray], step: int, meta: dict):
        self.arrays = arrays
        self.step = step
        self.meta = meta

    def section(self, prefix: str) -> dict[str, np.ndarray]:
        cut = len(prefix) + 1
        return {k[cut:]: v for k, v in self.arrays.items() if k.startswith(prefix + "/")}


def load_checkpoint(path) -> Checkpoint:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise ContractError(f"checkpoint {path} is truncated")
    (mlen,) = struct.unpack("<Q", data[:8])
    manifest = json.loads(data[8 : 8 + mlen].decode("utf-8"))
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ContractError(f"unsupported checkpoint format version: {version}")
    payload = data[8 + mlen :]
    arrays = {}
    for entry in manifest["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        arr = np.frombuffer(payload, dtype=entry["dtype"], count=count, offset=start)
        arrays[entry["name"]] = arr.reshape(shape).astype(np.float64)
    return Checkpoint(arrays, int(manifest["step"]), manifest.get("meta", {}))


def restore_into(store: ParameterStore, ckpt: Checkpoint):
    """Load parameter values, Adam moments, and the step counter."""
    store.load_values(ckpt.section("param"))
    store.load_moments(ckpt.section("adam_m"), ckpt.section("adam_v"))
    store.step = ckpt.step
