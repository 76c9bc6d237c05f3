"""Fractionally isomorphic graphs from step graphons, with exact certificates."""

from .balancer import build_balanced, gamma_round_matrix, verify_certificate
from .cutmetric import SignedStepKernel, cut_distance_step, cut_norm_exact, cut_norm_heuristic, zoom_bound
from .degseq import is_bigraphic, is_graphic, realize_bigraphic, realize_graphic
from .fintest import FICertificate, fi_oracle_trees, fractionally_isomorphic
from .kernelcore import FiniteGraph, PartitionedGraph, StepGraphon, stepped_density
from .params import PipelineParams, derive_params
from .pipeline import RunConfig, RunResult, run, run_regular
from .quotient import clean_beta_robust, coarsest_equitable, step_fi_equivalent
from .sampler import sample_once, sample_with_events

__version__ = "0.1.0"
