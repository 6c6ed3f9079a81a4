"""Synthetic datasets with exactly known per-pixel relevance."""

from faithlab.data.generate import (
    LabSample,
    color_index_map,
    gen_multi_color,
    gen_single_color,
    gt_mask,
)
from faithlab.data.io import export_dataset, import_dataset

__all__ = [
    "LabSample",
    "color_index_map",
    "export_dataset",
    "gen_multi_color",
    "gen_single_color",
    "gt_mask",
    "import_dataset",
]
