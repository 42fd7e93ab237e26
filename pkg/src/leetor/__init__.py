"""Khovanov homology, Lee homology over Q[t], and invariants read off from them."""

__version__ = "0.1.0"

from .cube import KH, LEE, build_complex, verify_d_squared
from .diagram import Diagram, braid_closure, mirror, parse_pd, resolve, unknot, writhe
from .homology import compute_homology, torsion_invariants
from .invariants import build_report, collapse_page, knight_move_check, page_dims, s_invariant

__all__ = [
    "KH",
    "LEE",
    "Diagram",
    "braid_closure",
    "build_complex",
    "build_report",
    "collapse_page",
    "compute_homology",
    "knight_move_check",
    "mirror",
    "page_dims",
    "parse_pd",
    "resolve",
    "s_invariant",
    "torsion_invariants",
    "unknot",
    "verify_d_squared",
    "writhe",
]
