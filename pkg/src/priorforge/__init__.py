"""priorforge: objective priors for parametric families, with numerical
verification of their coverage-matching properties."""

__version__ = "0.1.0"
