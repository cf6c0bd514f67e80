"""Poissonian interface growth in multiple dimensions.

A simulation and verification toolkit: heights of random partial orders,
a height process evolved by three mutually checking evaluators, its
Hopf-Lax macroscopic limit, and tracking of coupled defect boundaries
against the predicted characteristic sets.
"""

from .core import (
    GridRegion,
    GridSpec,
    Side,
    TaggedCoord,
    TaggedCorner,
    at,
    before,
    boundary_of,
    corner_at,
    corner_before,
    dominates,
    inclusion_gap,
    morph,
    region_from_predicate,
)
from .poisson import PointCloud, mix64, sample
from .chain import ChainEstimate, chain_height, estimate_c, longest_chain, tail_bound
from .growth import (
    EvolvedHeights,
    ProfileSpec,
    RoundedMacroProfile,
    StaircaseField,
    StaircaseProfile,
    WedgeProfile,
    evaluate_lpp,
    evaluate_oracle,
    generator_apply,
    jump_region,
    simulate_event_driven,
)
from .macroscopic import (
    ArgmaxSet,
    FlatMacro,
    GridMacro,
    MacroSolution,
    RarefactionMacro,
    ShockMacro,
    closed_form_u,
    forward_W,
    hopf_lax_solve,
    interface_X,
    shape_g,
    velocity,
)
from .coupling import CoupledState, DefectSnapshot, couple_evolve, \
    defect_from_maximizers
from .hammersley import (
    ParticleConfig,
    Trajectories,
    build_coupled_shock_pair,
    build_flat_field_2d,
    build_shock_field_2d,
    equilibrium_init,
    flux_past,
    simulate,
)
from .harness import ExperimentConfig, run_experiment

__all__ = [
    "GridRegion",
    "GridSpec",
    "Side",
    "TaggedCoord",
    "TaggedCorner",
    "at",
    "before",
    "boundary_of",
    "corner_at",
    "corner_before",
    "dominates",
    "inclusion_gap",
    "morph",
    "region_from_predicate",
    "PointCloud",
    "mix64",
    "sample",
    "ChainEstimate",
    "chain_height",
    "estimate_c",
    "longest_chain",
    "tail_bound",
    "EvolvedHeights",
    "ProfileSpec",
    "RoundedMacroProfile",
    "StaircaseField",
    "StaircaseProfile",
    "WedgeProfile",
    "evaluate_lpp",
    "evaluate_oracle",
    "generator_apply",
    "jump_region",
    "simulate_event_driven",
    "ArgmaxSet",
    "FlatMacro",
    "GridMacro",
    "MacroSolution",
    "RarefactionMacro",
    "ShockMacro",
    "closed_form_u",
    "forward_W",
    "hopf_lax_solve",
    "interface_X",
    "shape_g",
    "velocity",
    "CoupledState",
    "DefectSnapshot",
    "couple_evolve",
    "defect_from_maximizers",
    "ParticleConfig",
    "Trajectories",
    "build_coupled_shock_pair",
    "build_flat_field_2d",
    "build_shock_field_2d",
    "equilibrium_init",
    "flux_past",
    "simulate",
    "ExperimentConfig",
    "run_experiment",
]
