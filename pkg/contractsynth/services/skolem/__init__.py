"""Skolem extraction for forall-exists checks: AE-VAL, projection, refinement, certificates."""

from .aeval import DEFAULT_CAP, ae_val
from .certify import CertificateReport, Finding, certify_all, certify_skolem
from .mbp import mbp, select_literals
from .refiner import BoundClasses, classify, extract_skolem_function, refine
from .serialization import SkolemBundle, dumps, loads
from .types import (
    AevalResult,
    GuardedSkolem,
    Invalid,
    LocalRelation,
    QuantifiedCheck,
    SkolemCase,
    Valid,
    skolem_tags,
)

__all__ = [
    "AevalResult",
    "BoundClasses",
    "CertificateReport",
    "DEFAULT_CAP",
    "Finding",
    "GuardedSkolem",
    "Invalid",
    "LocalRelation",
    "QuantifiedCheck",
    "SkolemBundle",
    "SkolemCase",
    "Valid",
    "ae_val",
    "certify_all",
    "certify_skolem",
    "classify",
    "dumps",
    "extract_skolem_function",
    "loads",
    "mbp",
    "refine",
    "select_literals",
    "skolem_tags",
]
