"""Bayesian bivariate Conway-Maxwell-Poisson regression for paired scores."""

try:
    from ._bicmp import *  # noqa: F401,F403  (installed package layout)
    from ._bicmp import __version__  # noqa: F401
except ImportError:  # in-tree builds put _bicmp next to the build directory
    from _bicmp import *  # noqa: F401,F403
    from _bicmp import __version__  # noqa: F401
