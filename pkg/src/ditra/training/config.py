# training/config.py
from pydantic import BaseModel, ConfigDict, Field, model_validator


class TrainConfig(BaseModel):
    """
    Optimisation settings for both phases. The defaults are the full-scale
    schedule; `TrainConfig.desk_scale()` swaps every count for a laptop run.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    lr: float = Field(default=1e-4, gt=0)
    lr_decay_factor: float = Field(default=10.0, gt=1)
    phase1_epochs: int = Field(default=300, gt=0)
    phase1_decay_epoch: int = Field(default=250, gt=0)
    phase2_epochs: int = Field(default=40, gt=0)
    phase2_decay_epoch: int = Field(default=30, gt=0)
    steps_per_epoch: int = Field(default=1250, gt=0)
    batch_size: int = Field(default=8, gt=0)

    lambda_giou: float = Field(default=2.0, ge=0)
    lambda_l1: float = Field(default=5.0, ge=0)

    # transparent : opaque sampling ratio
    mix_transparent: int = Field(default=5, ge=0)
    mix_opaque: int = Field(default=3, ge=0)
    transparent_finetune: bool = True
    template_window: int = Field(default=200, ge=0)

    # search-region jitter; 0 disables
    center_jitter: float = Field(default=0.5, ge=0)
    scale_jitter: float = Field(default=0.25, ge=0)

    @model_validator(mode="after")
    def _check_schedule(self) -> "TrainConfig":
        if self.phase1_decay_epoch >= self.phase1_epochs:
            raise ValueError(f"phase-1 decay epoch {self.phase1_decay_epoch} must precede {self.phase1_epochs}")
        if self.phase2_decay_epoch >= self.phase2_epochs:
            raise ValueError(f"phase-2 decay epoch {self.phase2_decay_epoch} must precede {self.phase2_epochs}")
        if self.mix_transparent + self.mix_opaque == 0:
            raise ValueError("at least one training pool needs a positive mix weight")
        return self

    @classmethod
    def desk_scale(cls, **overrides) -> "TrainConfig":
        """One step per epoch: 2000 phase-1 steps decaying at 1700, 400 phase-2 steps decaying at 300."""
        values = dict(
            phase1_epochs=2000,
            phase1_decay_epoch=1700,
            phase2_epochs=400,
            phase2_decay_epoch=300,
            steps_per_epoch=1,
            batch_size=8,
        )
        values.update(overrides)
        return cls(**values)

    @property
    def transparent_fraction(self) -> float:
        if not self.transparent_finetune:
            return 0.0
        return self.mix_transparent / (self.mix_transparent + self.mix_opaque)

    def epochs(self, phase: int) -> int:
        return self.phase1_epochs if phase == 1 else self.phase2_epochs

    def decay_epoch(self, phase: int) -> int:
        return self.phase1_decay_epoch if phase == 1 else self.phase2_decay_epoch
