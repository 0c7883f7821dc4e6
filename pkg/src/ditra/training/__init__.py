from ditra.training.config import TrainConfig
from ditra.training.gradcheck import finite_difference_check
from ditra.training.losses import loss_aux, loss_bb, loss_phase1, loss_phase2
from ditra.training.sampling import (
    Phase1Sample,
    Phase2Sample,
    TrainingPools,
    sample_phase1,
    sample_phase2,
)
from ditra.training.schedule import learning_rate_at, make_optimizer, make_scheduler
from ditra.training.trainer import TrainResult, train_phase1, train_phase2

__all__ = [
    "Phase1Sample",
    "Phase2Sample",
    "TrainConfig",
    "TrainResult",
    "TrainingPools",
    "finite_difference_check",
    "learning_rate_at",
    "loss_aux",
    "loss_bb",
    "loss_phase1",
    "loss_phase2",
    "make_optimizer",
    "make_scheduler",
    "sample_phase1",
    "sample_phase2",
    "train_phase1",
    "train_phase2",
]
