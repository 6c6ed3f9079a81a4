"""On-disk weight bundles: manifest.json + weights.bin.

weights.bin concatenates every layer's weight then bias as little-endian
float64 in row-major order; the manifest records byte offsets that must
partition the blob exactly. load(save(net)) reproduces weights
bit-identically.
"""

import json
import os

import numpy as np

from faithlab.errors import DatasetIOError
from faithlab.graph import Layer, NetGraph

FORMAT_VERSION = 1


def save_bundle(net: NetGraph, directory: str, config: dict = None) -> None:
    os.makedirs(directory, exist_ok=True)
    blob = bytearray()
    entries = []
    for layer in net.layers:
        entry = {
            "kind": layer.kind,
            "name": layer.name,
            "stride": list(layer.stride) if layer.stride else None,
        }
        for field in ("weight", "bias"):
            arr = getattr(layer, field)
            if arr is None:
                entry[field] = None
            else:
                data = np.ascontiguousarray(arr, dtype="<f8").tobytes()
                entry[field] = {
                    "shape": list(arr.shape),
                    "offset": len(blob),
                    "nbytes": len(data),
                }
                blob += data
        entries.append(entry)
    manifest = {
        "format_version": FORMAT_VERSION,
        "input_shape": list(net.input_shape),
        "taps": dict(net.taps),
        "config": config or {},
        "total_bytes": len(blob),
        "layers": entries,
    }
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    with open(os.path.join(directory, "weights.bin"), "wb") as fh:
        fh.write(bytes(blob))


def load_bundle(directory: str):
    """Returns (net, manifest). Validates offsets before building."""
    man_path = os.path.join(directory, "manifest.json")
    bin_path = os.path.join(directory, "weights.bin")
    for path in (man_path, bin_path):
        if not os.path.exists(path):
            raise DatasetIOError(f"missing bundle file: {path}")
    with open(man_path) as fh:
        manifest = json.load(fh)
    if manifest.get("format_version") != FORMAT_VERSION:
        raise DatasetIOError(
            f"unsupported bundle format {manifest.get('format_version')!r}"
        )
    blob = open(bin_path, "rb").read()
    if len(blob) != manifest["total_bytes"]:
        raise DatasetIOError(
            f"weights.bin is {len(blob)} bytes, manifest says "
            f"{manifest['total_bytes']} ({bin_path})"
        )
    cursor = 0
    layers = []
    for k, entry in enumerate(manifest["layers"]):
        arrays = {}
        for field in ("weight", "bias"):
            meta = entry[field]
            if meta is None:
                arrays[field] = None
                continue
            if meta["offset"] != cursor:
                raise DatasetIOError(
                    f"layer {k} {field} offset {meta['offset']} does not "
                    f"continue the blob at {cursor} ({man_path})"
                )
            end = cursor + meta["nbytes"]
            if end > len(blob):
                raise DatasetIOError(f"layer {k} {field} overruns weights.bin")
            arr = np.frombuffer(blob[cursor:end], dtype="<f8").reshape(meta["shape"])
            arrays[field] = arr.astype(np.float64)
            cursor = end
        layers.append(
            Layer(
                entry["kind"],
                arrays["weight"],
                arrays["bias"],
                stride=tuple(entry["stride"]) if entry["stride"] else None,
                name=entry.get("name", ""),
            )
        )
    if cursor != len(blob):
        raise DatasetIOError(
            f"weights.bin has {len(blob) - cursor} trailing bytes ({bin_path})"
        )
    net = NetGraph(
        layers,
        input_shape=tuple(manifest["input_shape"]),
        taps={k: int(v) for k, v in manifest["taps"].items()},
    )
    return net, manifest
