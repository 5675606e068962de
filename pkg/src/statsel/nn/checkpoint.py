"""Flat weight serialization: little-endian f32, layer order, C order."""

import numpy as np

from ..errors import CheckpointError


def weights_to_bytes(params: list) -> bytes:
    """Concatenate every parameter array as little-endian float32."""
    return b"".join(np.ascontiguousarray(p, dtype="<f4").tobytes() for p in params)


def bytes_to_weights(data: bytes, params: list) -> None:
    """Fill parameter arrays in place from a flat weight blob."""
    need = sum(p.size for p in params) * 4
    if len(data) != need:
        raise CheckpointError(
            f"weight blob holds {len(data)} bytes, model needs {need}"
        )
    off = 0
    for p in params:
        n = p.size * 4
        flat = np.frombuffer(data, dtype="<f4", count=p.size, offset=off)
        p[:] = flat.reshape(p.shape)
        off += n
