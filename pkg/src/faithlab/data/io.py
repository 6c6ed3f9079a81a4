"""Dataset directory layout:

    images/NNNN.png   single-channel (single-color) or RGB (multi-color)
    gt/NNNN.png       signed mask encoded {0 -> 128, +1 -> 255, -1 -> 0}
    meta/NNNN.json    label, seed, patch specs, counts
    dataset.json      config echo, count, format version

Import is the exact inverse of export.
"""

import json
import os

import numpy as np
from PIL import Image

from faithlab.data.generate import LabSample
from faithlab.errors import DatasetIOError

FORMAT_VERSION = 1
_GT_ENCODE = {0: 128, 1: 255, -1: 0}


def export_dataset(samples, directory: str, config_echo: dict = None) -> None:
    if not samples:
        raise DatasetIOError("refusing to export an empty dataset")
    for sub in ("images", "gt", "meta"):
        os.makedirs(os.path.join(directory, sub), exist_ok=True)
    channels = samples[0].image.shape[0]
    for i, s in enumerate(samples):
        name = f"{i:04d}"
        arr = np.round(s.image).astype(np.uint8)
        if channels == 1:
            img = Image.fromarray(arr[0], mode="L")
        else:
            img = Image.fromarray(arr.transpose(1, 2, 0), mode="RGB")
        img.save(os.path.join(directory, "images", name + ".png"))

        enc = np.full(s.gt_signed.shape, 128, dtype=np.uint8)
        enc[s.gt_signed > 0] = 255
        enc[s.gt_signed < 0] = 0
        Image.fromarray(enc, mode="L").save(
            os.path.join(directory, "gt", name + ".png")
        )

        meta = dict(s.meta)
        meta["label"] = int(s.label)
        with open(os.path.join(directory, "meta", name + ".json"), "w") as fh:
            json.dump(meta, fh, indent=1, sort_keys=True)
    with open(os.path.join(directory, "dataset.json"), "w") as fh:
        json.dump(
            {
                "format_version": FORMAT_VERSION,
                "count": len(samples),
                "channels": channels,
                "config": config_echo or {},
            },
            fh,
            indent=1,
            sort_keys=True,
        )


def import_dataset(directory: str):
    """Returns (samples, dataset_info)."""
    index_path = os.path.join(directory, "dataset.json")
    if not os.path.exists(index_path):
        raise DatasetIOError(f"missing dataset index: {index_path}")
    try:
        with open(index_path) as fh:
            info = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatasetIOError(f"corrupt dataset index {index_path}: {exc}") from None
    if info.get("format_version") != FORMAT_VERSION:
        raise DatasetIOError(
            f"unsupported dataset format {info.get('format_version')!r}"
        )
    samples = []
    for i in range(info["count"]):
        name = f"{i:04d}"
        img_path = os.path.join(directory, "images", name + ".png")
        gt_path = os.path.join(directory, "gt", name + ".png")
        meta_path = os.path.join(directory, "meta", name + ".json")
        for path in (img_path, gt_path, meta_path):
            if not os.path.exists(path):
                raise DatasetIOError(f"missing dataset file: {path}")
        arr = np.asarray(Image.open(img_path), dtype=np.float64)
        if arr.ndim == 2:
            image = arr[None]
        else:
            image = arr.transpose(2, 0, 1)
        enc = np.asarray(Image.open(gt_path), dtype=np.int64)
        gt = np.zeros(enc.shape, dtype=np.float64)
        gt[enc == 255] = 1.0
        gt[enc == 0] = -1.0
        if not np.isin(enc, (0, 128, 255)).all():
            raise DatasetIOError(f"gt mask has values outside the encoding: {gt_path}")
        try:
            with open(meta_path) as fh:
                meta = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetIOError(f"corrupt metadata {meta_path}: {exc}") from None
        label = int(meta.pop("label"))
        samples.append(LabSample(image=image, label=label, gt_signed=gt, meta=meta))
    return samples, info
