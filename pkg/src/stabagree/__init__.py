"""Exact model checking of stabilizing agreement in round-based systems."""

from .adversary import (AdversarySpec, Scenario, allowed_patterns, builtin_scenario,
                        enumerate_runs, explicit, load_scenario, max_drops, replay,
                        unrestricted)
from .formula import (PrimitiveValueFormula, enumerate_phi, parse, pvf_implies,
                      pvf_to_formula, to_text)
from .model import ConfigurationError, InterpretedSystem, local_state_equal
from .protocol import ValueSelectionStrategy, assign_choices, parse_strategy, select_value
from .semantics import (current_primitive_knowledge, eval_run, eval_system,
                        mutually_known_limit, mutually_known_primitive,
                        primitive_knowledge_limit)

__version__ = "0.1.0"
