"""Structured random sketching with certified isometry properties.

Signed subsampled orthonormal transforms give log-linear-time embeddings
that behave like dense Gaussian projections on arbitrary point sets. This
package builds such operators, certifies their sparse-vector isometry at
desk scale, estimates the Gaussian mean width and chaining complexity of
test sets, and ships an experiment harness (CLI: ``sorsketch``) for
distortion sweeps and timing benchmarks.
"""

__version__ = "0.1.0"

from . import chaining, geometry, harness, rip, sketch, transforms

__all__ = ["chaining", "geometry", "harness", "rip", "sketch", "transforms", "__version__"]
