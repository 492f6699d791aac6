from .settings import config, Limits
from .program import AtomSet, Rule, Program, intern_program, project
from .io import parse_program, render_program, load_program, parse_dimacs, load_cnf
from .depgraph import build_dep_graph, sccs, is_hcf
from .elementary import (
    is_outbound,
    is_elementary_bruteforce,
    is_elementary_poly,
    verify_witness,
)
from .hef import HefStatus, is_hef, extract_witness, verify_certificate
from .semantics import reduct, is_model, stable_models, shift
from .reduction import build_reduction, sat_bruteforce, assignment_set, cross_validate
from .registry import load_example
