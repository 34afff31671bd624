from .a2c import NonFiniteLossError, RMSProp, Rollout, TrainConfig, compute_returns, update
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .network import ActorCritic, entropy
from .policies import random_policy, select_action, standard_policy

__all__ = [
    "ActorCritic", "CheckpointError", "NonFiniteLossError", "RMSProp", "Rollout",
    "TrainConfig", "compute_returns", "entropy", "load_checkpoint", "random_policy",
    "save_checkpoint", "select_action", "standard_policy", "update",
]
