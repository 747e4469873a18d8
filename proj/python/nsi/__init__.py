"""Estimators for linear models with mixed sparse and dense coefficient blocks.

The heavy lifting lives in the `_nsi` extension module; this package
re-exports its surface. The extension sits inside the package in an installed
wheel and next to it on the build-tree PYTHONPATH.
"""

try:
    from ._nsi import *  # noqa: F401,F403
    from ._nsi import __version__  # noqa: F401
except ImportError:  # build tree: extension lives outside the package
    from _nsi import *  # noqa: F401,F403
    from _nsi import __version__  # noqa: F401
