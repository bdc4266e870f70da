"""Bernoulli free-boundary problems for the half Laplacian at desk scale.

Subpackages: geometry (planar convex bodies and masks), kernels
(closed-form constants and Poisson machinery), gagliardo (discrete
H^{1/2} forms and solves), exterior / interior (relaxed variational
solvers and the Bernoulli constant), spectral (cylinder localization
and the subsolution method), cli (command-line surface), acceptance
(the verification suite).
"""

__version__ = "0.1.0"

from . import geometry, grids, kernels  # noqa: F401
