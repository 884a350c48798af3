"""Granular computing toolkit: rough-set reducts and SOM-granulated TSK
neuro-fuzzy search for small tabular datasets."""

from . import errors
from .errors import *  # noqa: F401,F403
from ._kernels import BACKEND
from .table import (
    AttributeSpec,
    InformationTable,
    SplitSpec,
    encode_categorical,
    load_table,
    split_train_test,
    write_csv,
)
from .synthetic import generate_synthetic, load_bundled

__version__ = "0.1.0"
