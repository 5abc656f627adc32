from ..errors import ConfigError
from .base import TrainParams, UpdateDiagnostics
from .dqn import DqnAgent
from .sac import SacAgent, SacState
from .variants import VARIANTS, AgentVariant, get_variant


def make_agent(variant: AgentVariant, env_spec, params: TrainParams, seed: int):
    if variant.family == "dqn":
        return DqnAgent(variant, env_spec, params, seed)
    return SacAgent(variant, env_spec, params, seed)


__all__ = ["TrainParams", "UpdateDiagnostics", "DqnAgent", "SacAgent",
           "SacState", "VARIANTS", "AgentVariant", "get_variant", "make_agent"]
