"""Embeddings between Besov-type and Triebel-Lizorkin-type spaces.

The package decides continuity and compactness of embeddings with exact
rational arithmetic and checks the verdicts numerically on wavelet
sequence-space quasi-norms.
"""

from .classifier import (
    GammaBranch,
    GammaValue,
    Relation,
    Verdict,
    classify,
    classify_besov_morrey,
    classify_hybrid,
    gamma,
    gamma_max_form,
)
from .params import (
    INF,
    ExtRational,
    NamedKind,
    NamedSpace,
    ParamError,
    RegionTag,
    Scale,
    Setting,
    SpaceParams,
    normalize_coincidence,
    region_of,
    resolve_named,
    space_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "GammaBranch", "GammaValue", "Relation", "Verdict", "classify", "classify_besov_morrey",
    "classify_hybrid", "gamma", "gamma_max_form", "INF", "ExtRational", "NamedKind", "NamedSpace",
    "ParamError", "RegionTag", "Scale", "Setting", "SpaceParams", "normalize_coincidence",
    "region_of", "resolve_named", "space_from_json",
]
