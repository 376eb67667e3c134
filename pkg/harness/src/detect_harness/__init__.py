"""Training and evaluation harness for high-risk launch detection.

Consumes the corpus files a launchlab pipeline run leaves behind (feature
table + schema manifest, per-launch time series, labels, task file, post
series, manifest) and benchmarks tabular and sequence classifiers under an
imbalance-aware objective. Emits score files the primary backtest consumes.
"""

__version__ = "0.1.0"
