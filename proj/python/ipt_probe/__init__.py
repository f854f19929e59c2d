"""Python access to the ipt-probe core.

Headers cross the boundary as dicts; the wire format itself is produced by the
C++ encoder, so bytes built here match what the CLI sends.
"""

import json

from ._ipt_probe import (
    MAX_HEADER_BYTES,
    MAX_PAYLOAD_BYTES,
    PROTOCOL_VERSION,
    ConfigError,
    DataError,
    EndpointError,
    Error,
    ProtocolError,
    changing_rates,
    classify_regime,
    golden_vectors,
    loop_closure,
    pca,
)
from . import _ipt_probe as _core

__all__ = [
    "MAX_HEADER_BYTES", "MAX_PAYLOAD_BYTES", "PROTOCOL_VERSION",
    "ConfigError", "DataError", "EndpointError", "Error", "ProtocolError",
    "apply_transform", "changing_rates", "classify_regime", "decode_message", "encode_message",
    "golden_vectors", "loop_closure", "mock_exchange", "pca", "split_messages",
]


def encode_message(header, payload=b""):
    return _core.encode_message(json.dumps(header, ensure_ascii=False), bytes(payload))


def decode_message(data):
    """Decode the frame at the start of data -> (header, payload, consumed)."""
    header, payload, consumed = _core.decode_message(bytes(data))
    return json.loads(header), payload, consumed


def split_messages(data):
    out = []
    data = bytes(data)
    while data:
        header, payload, consumed = decode_message(data)
        out.append((header, payload))
        data = data[consumed:]
    return out


def mock_exchange(request, labels, mode="uniform", seed=0):
    return _core.mock_exchange(bytes(request), list(labels), mode, seed)


def apply_transform(frames, spec, video_id="video"):
    """frames: uint8 array (n, h, w, 3); spec: {"kind": ..., "params": {...}}."""
    return _core.apply_transform(frames, json.dumps(spec), video_id)
