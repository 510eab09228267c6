"""Model checking and differential testing for variants of distributed knowledge."""
from .formula import parse, to_string, meta
from .kripke import KripkeModel, PointedModel, GeneratorParams, random_model, s5_closure, validate
from .bisim import partition, closure, bisimilar, characteristic_formula
from .semantics import Variant, ALL_VARIANTS, INTERSECTION, FULLCOMM, evaluate, extension

__version__ = "0.1.0"

__all__ = [
    "parse", "to_string", "meta",
    "KripkeModel", "PointedModel", "GeneratorParams", "random_model", "s5_closure", "validate",
    "partition", "closure", "bisimilar", "characteristic_formula",
    "Variant", "ALL_VARIANTS", "INTERSECTION", "FULLCOMM", "evaluate", "extension",
]
