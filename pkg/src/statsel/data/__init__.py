"""Dataset generation, reshaping, and binary serialization."""

from .binio import (
    MAGIC,
    VERSION,
    file_sha256,
    load_manifest,
    load_split,
    read_split,
    save_dataset,
    write_split,
)
from .generate import generate_labeled, generate_regression, generate_test
from .records import LabeledSample, Split, matrix_side, reshape_sample

__all__ = [
    "MAGIC",
    "VERSION",
    "LabeledSample",
    "Split",
    "matrix_side",
    "reshape_sample",
    "file_sha256",
    "load_manifest",
    "load_split",
    "read_split",
    "save_dataset",
    "write_split",
    "generate_labeled",
    "generate_test",
    "generate_regression",
]
