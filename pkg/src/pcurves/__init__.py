"""Persistence curves of grayscale images."""

from .cubical import (BinaryImage, Cell, FilteredComplex, GrayscaleImage, betti_oracle,
                      build_filtered_complex, complement, threshold)
from .curves import (CURVES, PersistenceCurve, PsiFunction, Statistic, betti_curve, ecc,
                     evaluate_curve, landscape_k, le_curve, persistence_statistics)
from .metrics import bottleneck, curve_l1_distance, wasserstein
from .persistence import (PersistenceDiagram, betti_at, cap_infinite, compute_persistence,
                          image_persistence)
from .stability import corollary_check, entropy_bound, theorem1_bound, theorem1_report

__all__ = [
    "BinaryImage", "Cell", "FilteredComplex", "GrayscaleImage", "betti_oracle",
    "build_filtered_complex", "complement", "threshold",
    "CURVES", "PersistenceCurve", "PsiFunction", "Statistic", "betti_curve", "ecc",
    "evaluate_curve", "landscape_k", "le_curve", "persistence_statistics",
    "bottleneck", "curve_l1_distance", "wasserstein",
    "PersistenceDiagram", "betti_at", "cap_infinite", "compute_persistence", "image_persistence",
    "corollary_check", "entropy_bound", "theorem1_bound", "theorem1_report",
]
