"""Stochastic elementary hornets: nets-within-nets whose net-tokens are
rewritten by a net algebra, with rate-based firing probabilities, the
induced discrete Markov chain, seeded simulation and a self-adaptation
scenario."""

from .algebra import Const, Op, Var, op_fix_choice, op_parallel, op_update_rate, op_xor, \
    parse_guard, parse_term
from .engine import Mode, ObjEvent, SyncEvent, SysTransition, SystemNet, check_phi, \
    enabled_events, enumerate_modes, fire
from .errors import HornetError, ModelError
from .mape import MapeConfig, apply_mape_rates, mape_rate, transformation_complexity
from .marking import NestedMarking, token
from .modelfile import Model, format_model, load_model, parse_model
from .multiset import Multiset
from .objectnet import Kind, ObjectNet
from .stochastic import Simulator, build_dmc, firing_probabilities, simulate, \
    transient_distribution

__all__ = ["Const", "Op", "Var", "op_fix_choice", "op_parallel", "op_update_rate", "op_xor",
           "parse_guard", "parse_term", "Mode", "ObjEvent", "SyncEvent", "SysTransition",
           "SystemNet", "check_phi", "enabled_events", "enumerate_modes", "fire", "HornetError",
           "ModelError", "MapeConfig", "apply_mape_rates", "mape_rate",
           "transformation_complexity", "NestedMarking", "token", "Model", "format_model",
           "load_model", "parse_model", "Multiset", "Kind", "ObjectNet", "Simulator", "build_dmc",
           "firing_probabilities", "simulate", "transient_distribution"]

__version__ = "0.1.0"
