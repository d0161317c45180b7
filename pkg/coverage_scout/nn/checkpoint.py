"""QNETCKPT/1 checkpoint container.

Layout::

    QNETCKPT/1\\n
    <8-byte little-endian header length>
    <JSON header: {"metadata": {...}, "entries": [{name, shape, dtype, offset, nbytes}]}>
    <raw little-endian float64 data>

Entries are policy weights (``policy/<layer>.<param>``) and, when present,
Adam moments (``adam_m/...``, ``adam_v/...``).
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from coverage_scout.exceptions import CheckpointError
from coverage_scout.nn.optim import Adam
from coverage_scout.nn.qnet import QNetwork
from coverage_scout.utils.logging import get_logger

logger = get_logger(__name__)

MAGIC = b"QNETCKPT/1\n"
DTYPE = "<f8"


@dataclass
class Checkpoint:
    """Decoded checkpoint: named arrays plus free-form metadata."""

    arrays: dict[str, NDArray[np.float64]] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def step_limit(self) -> int:
        try:
            return int(self.metadata["step_limit"])
        except KeyError as e:
            raise CheckpointError("Checkpoint metadata lacks step_limit") from e

    @property
    def counters(self) -> dict[str, int]:
        return {k: int(v) for k, v in self.metadata.get("counters", {}).items()}


def save_checkpoint(
    path: str | Path,
    net: QNetwork,
    optimizer: Adam | None = None,
    metadata: dict[str, Any] | None = None,
) -> Path:
    """Serialize the network (and optimizer moments) to path."""
    arrays: dict[str, NDArray[np.float64]] = {
        f"policy/{name}": t.values for name, t in net.named_parameters()
    }
    meta = dict(metadata or {})
    meta["step_limit"] = net.step_limit
    meta["dtype"] = net.dtype.name
    if optimizer is not None:
        state = optimizer.state_dict()
        meta["adam_t"] = state["t"]
        arrays.update({f"adam_m/{k}": v for k, v in state["m"].items()})
        arrays.update({f"adam_v/{k}": v for k, v in state["v"].items()})

    entries = []
    blobs = []
    offset = 0
    for name, values in arrays.items():
        blob = np.ascontiguousarray(values, dtype=DTYPE).tobytes()
        entries.append(
            {
                "name": name,
                "shape": list(values.shape),
                "dtype": DTYPE,
                "offset": offset,
                "nbytes": len(blob),
            }
        )
        blobs.append(blob)
        offset += len(blob)

    header = json.dumps({"metadata": meta, "entries": entries}, sort_keys=True).encode("utf-8")

    out = Path(path)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<Q", len(header)))
            f.write(header)
            for blob in blobs:
                f.write(blob)
    except OSError as e:
        raise CheckpointError(f"Error writing checkpoint {out}: {e}") from e

    logger.debug(f"Checkpoint written to {out} ({len(entries)} entries, {offset} bytes)")
    return out


def load_checkpoint(path: str | Path) -> Checkpoint:
    """
    Parse a QNETCKPT/1 file.

    Raises:
        CheckpointError: If the file is missing, has another version tag or is truncated
    """
    src = Path(path)
    if not src.exists():
        raise CheckpointError(f"Checkpoint not found: {src}")
    try:
        raw = src.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Error reading checkpoint {src}: {e}") from e

    if not raw.startswith(MAGIC):
        tag = raw.split(b"\n", 1)[0][:32].decode("utf-8", errors="replace")
        raise CheckpointError(f"{src}: expected version tag QNETCKPT/1, found {tag!r}")

    pos = len(MAGIC)
    if len(raw) < pos + 8:
        raise CheckpointError(f"{src}: truncated header length")
    (header_len,) = struct.unpack("<Q", raw[pos : pos + 8])
    pos += 8
    try:
        header = json.loads(raw[pos : pos + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{src}: corrupt header: {e}") from e
    data = raw[pos + header_len :]

    arrays = {}
    for entry in header.get("entries", []):
        if entry.get("dtype") != DTYPE:
            raise CheckpointError(
                f"{src}: unsupported dtype {entry.get('dtype')} in {entry['name']}"
            )
        start, nbytes = int(entry["offset"]), int(entry["nbytes"])
        if start + nbytes > len(data):
            raise CheckpointError(f"{src}: entry {entry['name']} runs past end of file")
        values = np.frombuffer(data[start : start + nbytes], dtype=DTYPE)
        arrays[entry["name"]] = values.reshape(entry["shape"]).astype(np.float64)

    return Checkpoint(arrays=arrays, metadata=header.get("metadata", {}))


def restore_network(checkpoint: Checkpoint, net: QNetwork) -> None:
    """Load policy weights into net, checking every name and shape."""
    if checkpoint.step_limit != net.step_limit:
        raise CheckpointError(
            f"Checkpoint step limit {checkpoint.step_limit} does not match network "
            f"step limit {net.step_limit}"
        )
    for name, tensor in net.named_parameters():
        key = f"policy/{name}"
        if key not in checkpoint.arrays:
            raise CheckpointError(f"Checkpoint lacks parameter {name}")
        saved = checkpoint.arrays[key]
        if saved.shape != tensor.shape:
            raise CheckpointError(f"{name}: checkpoint shape {saved.shape} != {tensor.shape}")
        tensor.values = saved.astype(net.dtype, copy=True)


def restore_optimizer(checkpoint: Checkpoint, optimizer: Adam) -> None:
    if "adam_t" not in checkpoint.metadata:
        raise CheckpointError("Checkpoint carries no optimizer state")
    try:
        optimizer.load_state_dict(
            {
                "t": checkpoint.metadata["adam_t"],
                "m": {p.name: checkpoint.arrays[f"adam_m/{p.name}"] for p in optimizer.params},
                "v": {p.name: checkpoint.arrays[f"adam_v/{p.name}"] for p in optimizer.params},
            }
        )
    except KeyError as e:
        raise CheckpointError(f"Checkpoint lacks optimizer moment {e.args[0]}") from e


def load_network(path: str | Path, dtype: Any = np.float32) -> QNetwork:
    """Build a QNetwork sized from the checkpoint and load its weights."""
    checkpoint = load_checkpoint(path)
    net = QNetwork(step_limit=checkpoint.step_limit, dtype=dtype)
    restore_network(checkpoint, net)
    return net
