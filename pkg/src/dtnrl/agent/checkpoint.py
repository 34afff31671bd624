"""Binary checkpoint format.

Layout (little-endian)::

    magic        8 bytes  b"DTNRLA2C"
    version      uint32
    n_dims       uint32
    dims         n_dims x uint32   (inputs, hidden..., actions)
    seed         int64
    episode      int64
    has_opt      uint32            1 if optimizer accumulators follow
    weights      float64[]         W1 b1 W2 b2 Wpi bpi Wv bv
    accumulators float64[]         same order, only when has_opt
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .a2c import RMSProp
from .network import PARAM_ORDER, ActorCritic

MAGIC = b"DTNRLA2C"
VERSION = 1


class CheckpointError(ValueError):
    def __init__(self, field, detail):
        super().__init__(f"checkpoint field '{field}': {detail}")
        self.field = field


def _shapes(dims):
    n_in, h1, h2, n_act = dims
    return {
        "W1": (h1, n_in), "b1": (h1,), "W2": (h2, h1), "b2": (h2,),
        "Wpi": (n_act, h2), "bpi": (n_act,), "Wv": (1, h2), "bv": (1,),
    }


def save_checkpoint(path, net: ActorCritic, optimizer: RMSProp | None = None, episode: int = 0) -> None:
    parts = [MAGIC, struct.pack("<II", VERSION, len(net.dims))]
    parts.append(struct.pack(f"<{len(net.dims)}I", *net.dims))
    parts.append(struct.pack("<qqI", int(net.seed), int(episode), 1 if optimizer else 0))
    for k in PARAM_ORDER:
        parts.append(np.ascontiguousarray(net.params[k], dtype="<f8").tobytes())
    if optimizer is not None:
        for k in PARAM_ORDER:
            parts.append(np.ascontiguousarray(optimizer.mean_square[k], dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path, learning_rate=1e-7, decay=0.99, epsilon=1e-5):
    """Returns ``(net, optimizer_or_None, episode)``."""
    data = Path(path).read_bytes()
    pos = 0

    def take(n, field):
        nonlocal pos
        if pos + n > len(data):
            raise CheckpointError(field, f"truncated at byte {pos}")
        chunk = data[pos : pos + n]
        pos += n
        return chunk

    if take(8, "magic") != MAGIC:
        raise CheckpointError("magic", "not a dtnrl checkpoint")
    version, n_dims = struct.unpack("<II", take(8, "version"))
    if version != VERSION:
        raise CheckpointError("version", f"unsupported format version {version}")
    if n_dims != 4:
        raise CheckpointError("dims", f"expected 4 layer dimensions, got {n_dims}")
    dims = struct.unpack("<4I", take(16, "dims"))
    if min(dims) < 1:
        raise CheckpointError("dims", f"invalid layer dimensions {dims}")
    seed, episode, has_opt = struct.unpack("<qqI", take(20, "seed/episode"))
    if has_opt not in (0, 1):
        raise CheckpointError("has_opt", f"expected 0 or 1, got {has_opt}")

    shapes = _shapes(dims)
    n_weights = sum(int(np.prod(s)) for s in shapes.values())
    expected = pos + 8 * n_weights * (1 + has_opt)
    if len(data) != expected:
        raise CheckpointError("weights", f"payload is {len(data) - pos} bytes, expected {expected - pos}")

    def read_arrays(field):
        out = {}
        for k in PARAM_ORDER:
            n = int(np.prod(shapes[k]))
            out[k] = np.frombuffer(take(8 * n, field), dtype="<f8").astype(float).reshape(shapes[k])
        return out

    net = object.__new__(ActorCritic)
    net.dims = tuple(dims)
    net.seed = seed
    net.params = read_arrays("weights")
    optimizer = None
    if has_opt:
        optimizer = RMSProp(net.params, learning_rate, decay, epsilon)
        optimizer.mean_square = read_arrays("accumulators")
    return net, optimizer, episode
