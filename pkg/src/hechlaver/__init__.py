"""Hechler/Laver dichotomy solver, certificate checker and game engine."""
from .dichotomy import (CertificateError, DichotomyCertificate, check_certificate, compute_gfp,
                        solve_dichotomy)
from .filters import Density, Filter, Frechet, LazyUltra, make_filter
from .presentations import PairAutomaton
from .setalg import ALL, EMPTY, Card, PeriodicSet
from .trees import Lasso, RegularTree, ThresholdFunction, from_threshold, full_tree

__version__ = "0.1.0"
