"""Numerical toolkit for conformal walk dimension experiments.

Subsystems: finite metric spaces and nets (:mod:`cwdlab.metric_core`),
hyperbolic fillings and weight synthesis (:mod:`cwdlab.filling`), Dirichlet
forms on p.c.f. fractals (:mod:`cwdlab.pcf`) and graph/1-D Harnack
diagnostics (:mod:`cwdlab.harnack`).
"""
__version__ = "0.1.0"

from . import errors  # noqa: F401
