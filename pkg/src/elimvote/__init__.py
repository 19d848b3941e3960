"""Elimination voting rules, manipulation solvers and hardness constructions."""

from .engines import EliminationTrace, Round, RuleSpec, parse_rule, run_rule, winner
from .manipulation import (
    BudgetExceeded,
    ManipulationQuery,
    ManipulationResult,
    find_manipulation,
    find_manipulation_brute,
    find_manipulation_frontier,
    min_coalition,
    sequential_manipulate,
)
from .profile import Ballot, Profile, ProfileError, ScoreTable, TieBreakPolicy, parse_profile, serialize_profile
from .scoring import RuleFamily, ScoringVector, adjoint, instantiate, parse_family

__all__ = [
    "Ballot", "BudgetExceeded", "EliminationTrace", "ManipulationQuery", "ManipulationResult",
    "Profile", "ProfileError", "Round", "RuleFamily", "RuleSpec", "ScoreTable", "ScoringVector",
    "TieBreakPolicy", "adjoint", "find_manipulation", "find_manipulation_brute",
    "find_manipulation_frontier", "instantiate", "min_coalition", "parse_family", "parse_profile",
    "parse_rule", "run_rule", "sequential_manipulate", "serialize_profile", "winner",
]
