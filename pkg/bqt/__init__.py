from .coherent_core import ChannelParams, reduced_pair_state, reduced_single_state
from .protocol import ProtocolConfig, TriggerPhase, teleported_states, sweep
from .circuit import build_bqt_circuit, default_init
from .simulator import run_exact, run_shots

__all__ = [
    "ChannelParams",
    "reduced_pair_state",
    "reduced_single_state",
    "ProtocolConfig",
    "TriggerPhase",
    "teleported_states",
    "sweep",
    "build_bqt_circuit",
    "default_init",
    "run_exact",
    "run_shots",
]
