"""Feature extraction, classification, noise and timing on top of the core library."""

from .bench import BenchmarkSpec, run_benchmark
from .classify import evaluate_splits, knn_classify, stratified_splits
from .features import FeatureConfig, FeatureVector, extract_features, extract_many
from .noise import add_noise
from .synthetic import texture_corpus

__all__ = [
    "BenchmarkSpec", "run_benchmark", "evaluate_splits", "knn_classify", "stratified_splits",
    "FeatureConfig", "FeatureVector", "extract_features", "extract_many", "add_noise",
    "texture_corpus",
]
