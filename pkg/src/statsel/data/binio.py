"""Binary dataset files and their JSON manifest sidecar.

Layout, little-endian throughout:

  magic "NMS1" (4 bytes) | version u32 | N u32 | record_count u64
  then record_count records of [model_id u16 | theta f64 | values N x f32]
"""

import hashlib
import json
import os
import struct

import numpy as np

from ..errors import DataFormatError
from .records import Split

MAGIC = b"NMS1"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


def _record_dtype(n: int) -> np.dtype:
    return np.dtype([("model_id", "<u2"), ("theta", "<f8"), ("values", "<f4", (n,))])


def write_split(path, split: Split) -> None:
    """Serialize a split; writes a temp file then renames atomically."""
    rec = np.empty(len(split), dtype=_record_dtype(split.n))
    rec["model_id"] = split.model_ids
    rec["theta"] = split.thetas
    rec["values"] = split.values
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, split.n, len(split)))
        rec.tofile(fh)
    os.replace(tmp, path)


def read_split(path) -> Split:
    """Parse and validate a split file; format errors name the byte offset."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise DataFormatError(
                f"{path}: truncated header, {_HEADER.size} bytes needed, "
                f"{len(head)} present (byte offset 0)"
            )
        magic, version, n, count = _HEADER.unpack(head)
        if magic != MAGIC:
            raise DataFormatError(f"{path}: bad magic {magic!r} (byte offset 0)")
        if version != VERSION:
            raise DataFormatError(f"{path}: unsupported version {version} (byte offset 4)")
        if n < 1:
            raise DataFormatError(f"{path}: invalid record width {n} (byte offset 8)")
        dtype = _record_dtype(n)
        rec = np.fromfile(fh, dtype=dtype)
    if len(rec) != count:
        raise DataFormatError(
            f"{path}: truncated records, {count} expected, {len(rec)} complete "
            f"(byte offset {_HEADER.size + len(rec) * dtype.itemsize})"
        )
    return Split(
        n=int(n),
        model_ids=rec["model_id"].astype(np.int64),
        thetas=rec["theta"].copy(),
        values=rec["values"].copy(),
    )


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def save_dataset(out_dir, manifest: dict, **splits) -> dict:
    """Write named splits as {name}.bin plus manifest.json; returns manifest."""
    os.makedirs(out_dir, exist_ok=True)
    manifest = dict(manifest)
    manifest["schema_version"] = VERSION
    manifest["record_counts"] = {}
    manifest["file_sha256"] = {}
    for name, split in splits.items():
        fname = f"{name}.bin"
        path = os.path.join(out_dir, fname)
        write_split(path, split)
        manifest["record_counts"][name] = len(split)
        manifest["file_sha256"][fname] = file_sha256(path)
    tmp = os.path.join(out_dir, "manifest.json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, os.path.join(out_dir, "manifest.json"))
    return manifest


def load_manifest(data_dir) -> dict:
    path = os.path.join(data_dir, "manifest.json")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DataFormatError(f"{path}: manifest not found")
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid manifest JSON ({exc})")


def load_split(data_dir, name: str, verify: bool = True) -> Split:
    """Read {name}.bin, checking its manifest hash unless verify=False."""
    path = os.path.join(data_dir, f"{name}.bin")
    if verify:
        manifest = load_manifest(data_dir)
        want = manifest.get("file_sha256", {}).get(f"{name}.bin")
        if want is not None and file_sha256(path) != want:
            raise DataFormatError(f"{path}: sha256 mismatch against manifest")
    return read_split(path)
