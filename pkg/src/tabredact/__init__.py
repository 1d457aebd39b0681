"""tabredact: targeted disinformation generation for tabular data.

Generates realistic records close to a protected target but confidently
labeled as a different class by a conservative probabilistic decision
boundary, and evaluates how inserting them degrades victim models on the
target and weakens membership inference attacks.
"""

from .boundary import PDB, AbstainMode, fit_label_model, lf_vote, pdb_precision
from .dataset import TabularDataset
from .datagen import make_mixture_dataset
from .encoding import EncodedVector, Encoder, encode, sq_distance
from .errors import ConfigError, DataError, TabRedactError, TrainingError
from .neighbors import PartialStrategy, nearest_examples, partial_select
from .pipeline import DisinfoConfig, DisinfoResult, build_pdb, redact
from .realism import build_pair_index, clip_quantize, is_realistic
from .schema import FeatureKind, FeatureSchema, FeatureSpec, infer_schema
from .watermark import Candidate, watermark

__version__ = "0.1.0"

__all__ = [
    "PDB",
    "AbstainMode",
    "Candidate",
    "ConfigError",
    "DataError",
    "DisinfoConfig",
    "DisinfoResult",
    "EncodedVector",
    "Encoder",
    "FeatureKind",
    "FeatureSchema",
    "FeatureSpec",
    "PartialStrategy",
    "TabRedactError",
    "TabularDataset",
    "TrainingError",
    "build_pair_index",
    "build_pdb",
    "clip_quantize",
    "encode",
    "fit_label_model",
    "infer_schema",
    "is_realistic",
    "lf_vote",
    "make_mixture_dataset",
    "nearest_examples",
    "partial_select",
    "pdb_precision",
    "redact",
    "sq_distance",
    "watermark",
]
