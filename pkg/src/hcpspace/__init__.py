"""Instance space analysis for the Hamiltonian completion problem."""
from .graph import Graph, GeneratorSpec, decode, encode, edge_index, generate
from .solvers import MslsParams, SolveResult, brute_force_hcn, exact_hcn, msls_hcn, reduce_to_tsp
from .features import FEATURE_NAMES, FeatureVector, feature_vector

__version__ = "0.1.0"
