"""kstab: stability of one-point blowups of cscK manifolds, numerically."""

__version__ = "0.1.0"
