"""Abstract interpretation and CEGAR model checking for MIL programs."""

from .cegar import CegarReport, cegar_loop, harvest_predicates
from .cfg import Cfg, lower_to_cfg
from .concrete import enumerate_reachable, replay_trace
from .fixpoint import WideningPolicy, analyze_cfg, analyze_function, check_post_fixpoint
from .intervals import Interval, IntervalEnv, interval
from .mil import Program, parse_predicate, parse_program
from .predabs import PredicateTable, abstract_post, build_abstract_ts
from .signs import Sign
from .simulation import RefinementInstance, check_refinement
from .ts import TransitionSystem, parse_ts, serialize_ts

__all__ = [
    "CegarReport", "cegar_loop", "harvest_predicates",
    "Cfg", "lower_to_cfg",
    "enumerate_reachable", "replay_trace",
    "WideningPolicy", "analyze_cfg", "analyze_function", "check_post_fixpoint",
    "Interval", "IntervalEnv", "interval",
    "Program", "parse_predicate", "parse_program",
    "PredicateTable", "abstract_post", "build_abstract_ts",
    "Sign",
    "RefinementInstance", "check_refinement",
    "TransitionSystem", "parse_ts", "serialize_ts",
]

__version__ = "0.1.0"
