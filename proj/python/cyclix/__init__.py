"""Cyclicity of reduced elliptic curves over prime fields.

Thin re-export of the compiled extension: curve point-group structure,
2-torsion field classification, certified density brackets (as exact
fractions.Fraction values) and parallel prime surveys.
"""

try:
    # installed layout: the extension lives inside the package
    from ._cyclix import *  # noqa: F401,F403
except ImportError:
    # build-tree layout: the extension sits next to the package on sys.path
    from _cyclix import *  # noqa: F401,F403

__version__ = "1.0.0"
