"""Reachability for 3-dimensional vector addition systems with states."""
from .core import OMEGA, Configuration, Domain, ExtVector, Path, RankVector, VassGraph, cycle_space, rank, run_path
from .diophantine import hilbert_basis, minimal_solutions, solve_affine
from .eff2d import band_encode, eff2d_reach, project
from .errors import (DomainViolation, InternalInconsistency, NotEff2D, ParseError, PreconditionUnmet,
                     ResourceLimit, VassError)
from .io import emit_vass, emit_witness, parse_config, parse_query, parse_vass
from .klm import KlmComponent, KlmSequence, klm_rank, witness_from_normal
from .lps import LinearPathScheme, enumerate_lps, extract_walk, lps_reach
from .oracle import bfs_oracle
from .solver import REACHABLE, UNKNOWN, UNREACHABLE, ReachResult, SolverConfig, klmst3, reach3

__all__ = [name for name in dir() if not name.startswith("_")]
