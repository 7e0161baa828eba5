"""Exact-arithmetic toolkit for deformed contact homology of codimension-2
contact submanifolds: index calculators, decorated-forest twisting maps,
cobordism energy gates, graded dg-algebras over Q[U] with linearization and
reduced cyclic homology, and the explicit open-book model tables."""

__version__ = "0.1.0"
