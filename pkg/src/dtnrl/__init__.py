"""Discrete-event LEO DTN constellation simulator with an actor-critic buffer manager."""

from .env import DtnEnv, EnvConfig, VisibilityConfig, compute_reward, penalty_factor
from .orbits import ConstellationSpec, ContactPlan, generate_contact_plan
from .traffic import TrafficConfig

__version__ = "0.1.0"

__all__ = [
    "ConstellationSpec", "ContactPlan", "DtnEnv", "EnvConfig", "TrafficConfig",
    "VisibilityConfig", "compute_reward", "generate_contact_plan", "penalty_factor",
]
