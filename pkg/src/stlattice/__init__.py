"""Exact point-line incidence configurations on lattices and the energies behind them."""

from .errors import InvalidArgument, ResourceLimit
from .exactnum import Fraction, QuadExt, canonical, parse_number, format_number, sqrt, st_of

__version__ = "0.1.0"
