"""Exact verification pipeline for covering the cube skeleton by 14 translates.

The modules build the polytopes ``O_p`` and ``Q_P``, generate the covering
systems ``L(P, tau)``, solve them in rational arithmetic and write
certificates that can be re-checked without any LP solver.
"""
from .certify import CertificateEntry, CertificateFile, check_entry, check_tiling, read_certificates, write_certificates
from .config import Box6, count_boxes, enumerate_boxes, q_polytope, reduce_to_D
from .cover import build_lp, enumerate_taus, lower_bound_check, verify_box
from .geometry import HPolytope, Halfspace, contains, hull3, intersect, vertices
from .lp import LinearSystem, Witness, check_witness, feasible_exact
from .search import SearchConfig, search_box, search_region, split

__version__ = "0.1.0"
