from .gae import discounted_advantages
from .net import NumericsError, PolicyNet
from .trainer import (
    Checkpoint,
    PpoConfig,
    RolloutBatch,
    TrainingDiverged,
    TrainResult,
    inference,
    load_checkpoint,
    ppo_loss,
    save_checkpoint,
    train,
)

__all__ = [
    "Checkpoint",
    "NumericsError",
    "PolicyNet",
    "PpoConfig",
    "RolloutBatch",
    "TrainResult",
    "TrainingDiverged",
    "discounted_advantages",
    "inference",
    "load_checkpoint",
    "ppo_loss",
    "save_checkpoint",
    "train",
]
