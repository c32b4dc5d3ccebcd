"""Parallel and distributed s-t min-cut with dynamic merging of subgraphs.

The solver splits a flow network into overlapping subgraphs, iterates
dual-decomposition updates over the shared vertices, and merges subgraphs
whenever agreement stalls, which guarantees convergence to the exact global
minimum cut.  A pseudo-boolean layer certifies every transformation (split,
flow push, dual update, merge) as an exact flow-offset reparameterization.
"""

from .bk import BkState
from .capacity import Cap
from .dimacs import DimacsError, read_dimacs, write_dimacs
from .engine import (CutResult, DualState, Engine, IterationStats,
                     SolverConfig, StrategyHooks, disagreement, dual_update,
                     pairwise_groups, run, schedule_hooks, solve_baseline_pbk,
                     solve_dynamic, solve_naive_converged, solve_serial)
from .graph import Assignment, FlowGraph
from .images import (GridImage, build_seg1, build_seg2, gen_synthetic,
                     read_pgm)
from .pseudo_boolean import (MultilinearPolynomial, Posiform, brute_force_min,
                             cut_cost, evaluate, graph_of,
                             poly_equal_up_to_constant, polynomial_of,
                             polynomial_of_graph, posiform_of)
from .split_merge import (Partition, RegionSpec, SeparabilityError,
                          adjust_transfer_bytes,
                          adjust_boundary, block_spec, boundary_band, merge,
                          split, split_grid, stripe_spec)
from .transport import InProcessTransport, SimulatedNetworkTransport

__all__ = [name for name in dir() if not name.startswith("_")]
