# seqgen/attributes.py
import logging
from collections import Counter
from typing import Dict, Iterable, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ditra.errors import DomainError

# transparency level -> alpha; the most opaque level is never sampled
ALPHA_TABLE: Dict[int, float] = {1: 0.45, 2: 0.25, 3: 0.10}
# rotation level -> degrees per frame; zero rotation is never sampled
ROTATION_DEGREES: Dict[int, float] = {1: 1.3, 2: 5.4, 3: 10.6}
# blur level -> motion-blur kernel length in pixels (level 0 is no blur)
BLUR_KERNEL_LENGTHS: Dict[int, int] = {0: 1, 1: 3, 2: 9, 3: 21}
STRIPE_COUNTS = (7, 11, 20)

BLUR_PROBABILITY = 0.15
OCCLUSION_PROBABILITY = 0.2
DISTRACTOR_PROBABILITY = 0.5

SHAPE_IDS = ("ellipse", "goblet", "bottle", "flask", "tumbler", "vase")

DistractorMode = Literal["follow", "crossing"]


class AttributeSpec(BaseModel):
    """The sampled attribute levels of one generated sequence."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    transparency_level: int = Field(ge=1, le=3)
    blur_present: bool = False
    blur_level: Optional[int] = None
    occlusion_present: bool = False
    occlusion_stripes: Optional[int] = None
    rotation_level: int = Field(ge=1, le=3)
    distractor: bool = False
    distractor_mode: DistractorMode = "follow"
    target_shape_id: str
    distractor_shape_id: Optional[str] = None
    background_id: str
    frame_count: int = Field(default=40, ge=2)
    frame_height: int = Field(default=240, ge=32)
    frame_width: int = Field(default=320, ge=32)
    opaque: bool = False
    rng_seed: int

    @model_validator(mode="after")
    def _check_levels(self) -> "AttributeSpec":
        if self.blur_present != (self.blur_level is not None):
            raise ValueError("blur_level must be set exactly when blur_present is true")
        if self.blur_level is not None and self.blur_level not in (1, 2, 3):
            raise ValueError(f"blur_level must be 1..3, got {self.blur_level}")
        if self.occlusion_present != (self.occlusion_stripes is not None):
            raise ValueError("occlusion_stripes must be set exactly when occlusion_present is true")
        if self.occlusion_stripes is not None and self.occlusion_stripes not in STRIPE_COUNTS:
            raise ValueError(f"occlusion_stripes must be one of {STRIPE_COUNTS}, got {self.occlusion_stripes}")
        if self.target_shape_id not in SHAPE_IDS:
            raise ValueError(f"unknown target shape '{self.target_shape_id}'")
        if self.distractor:
            if self.distractor_shape_id not in SHAPE_IDS:
                raise ValueError(f"unknown distractor shape '{self.distractor_shape_id}'")
            if self.distractor_shape_id == self.target_shape_id:
                raise ValueError("distractor must be of a different type than the target")
        elif self.distractor_shape_id is not None:
            raise ValueError("distractor_shape_id given for a sequence without distractor")
        return self

    @property
    def alpha(self) -> float:
        return 1.0 if self.opaque else ALPHA_TABLE[self.transparency_level]

    @property
    def rotation_degrees(self) -> float:
        return ROTATION_DEGREES[self.rotation_level]

    @property
    def blur_kernel_length(self) -> int:
        return BLUR_KERNEL_LENGTHS[self.blur_level or 0]

    def to_meta(self) -> Dict[str, str]:
        """key=value view for meta.txt; absent optionals are omitted."""
        return {key: str(value) for key, value in self.model_dump().items() if value is not None}

    @classmethod
    def from_meta(cls, values: Dict[str, str]) -> "AttributeSpec":
        return cls.model_validate(values)


def sample_attributes(
    rng: np.random.Generator,
    frame_count: int = 40,
    background_id: Optional[str] = None,
    opaque: bool = False,
    distractor_mode: DistractorMode = "follow",
    frame_size: Sequence[int] = (240, 320),
    force_distractor: Optional[bool] = None,
) -> AttributeSpec:
    """
    Draw one AttributeSpec. Blur is present with probability 0.15 and occlusion
    with 0.2; transparency, rotation, blur level and stripe count are uniform
    over their admissible sets and every shape type is equally likely.
    `force_distractor` overrides the distractor draw without changing the
    number of random draws.
    """
    transparency_level = int(rng.integers(1, 4))

    blur_present = bool(rng.random() < BLUR_PROBABILITY)
    blur_level = int(rng.integers(1, 4)) if blur_present else None

    occlusion_present = bool(rng.random() < OCCLUSION_PROBABILITY)
    occlusion_stripes = int(rng.choice(STRIPE_COUNTS)) if occlusion_present else None

    rotation_level = int(rng.integers(1, 4))
    drawn_distractor = bool(rng.random() < DISTRACTOR_PROBABILITY)
    distractor = drawn_distractor if force_distractor is None else force_distractor

    target_shape_id = str(rng.choice(SHAPE_IDS))
    others = [s for s in SHAPE_IDS if s != target_shape_id]
    other_shape_id = str(rng.choice(others))
    distractor_shape_id = other_shape_id if distractor else None

    # keep the draw count fixed so later draws do not depend on background_id
    drawn_background = int(rng.integers(0, 1_000_000))
    rng_seed = int(rng.integers(0, 2**31 - 1))

    return AttributeSpec(
        transparency_level=transparency_level,
        blur_present=blur_present,
        blur_level=blur_level,
        occlusion_present=occlusion_present,
        occlusion_stripes=occlusion_stripes,
        rotation_level=rotation_level,
        distractor=distractor,
        distractor_mode=distractor_mode,
        target_shape_id=target_shape_id,
        distractor_shape_id=distractor_shape_id,
        background_id=background_id if background_id is not None else f"proc-{drawn_background:06d}",
        frame_count=frame_count,
        frame_height=int(frame_size[0]),
        frame_width=int(frame_size[1]),
        opaque=opaque,
        rng_seed=rng_seed,
    )


SWEEPABLE = ("transparency", "blur", "occlusion", "rotation", "distractor")


def sweep_attributes(
    attribute: str,
    rng: np.random.Generator,
    frame_count: int = 40,
    background_id: Optional[str] = None,
    frame_size: Sequence[int] = (240, 320),
) -> List[AttributeSpec]:
    """
    One spec per level of a single attribute, everything else held at its
    mildest admissible level. All specs share shapes, background and seed so
    only the swept attribute differs.
    """
    if attribute not in SWEEPABLE:
        error_msg = f"Cannot sweep '{attribute}', expected one of {SWEEPABLE}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    base = sample_attributes(rng, frame_count=frame_count, background_id=background_id, frame_size=frame_size)
    shapes = [s for s in SHAPE_IDS if s != base.target_shape_id]
    mild = dict(
        transparency_level=1,
        blur_present=False,
        blur_level=None,
        occlusion_present=False,
        occlusion_stripes=None,
        rotation_level=1,
        distractor=False,
        distractor_shape_id=None,
    )

    levels: List[dict] = []
    if attribute == "transparency":
        levels = [{"transparency_level": level} for level in ALPHA_TABLE]
    elif attribute == "blur":
        levels = [{}] + [{"blur_present": True, "blur_level": level} for level in (1, 2, 3)]
    elif attribute == "occlusion":
        levels = [{}] + [{"occlusion_present": True, "occlusion_stripes": n} for n in STRIPE_COUNTS]
    elif attribute == "rotation":
        levels = [{"rotation_level": level} for level in ROTATION_DEGREES]
    elif attribute == "distractor":
        levels = [{}, {"distractor": True, "distractor_shape_id": shapes[0]}]

    specs = []
    for update in levels:
        values = base.model_dump()
        values.update(mild)
        values.update(update)
        specs.append(AttributeSpec.model_validate(values))
    return specs


def attribute_statistics(specs: Iterable[AttributeSpec]) -> Dict[str, object]:
    """Empirical marginals of a batch of specs."""
    specs = list(specs)
    n = len(specs)
    if n == 0:
        return {"count": 0}

    transparency = Counter(s.transparency_level for s in specs)
    rotation = Counter(s.rotation_level for s in specs)
    stripes = Counter(s.occlusion_stripes for s in specs if s.occlusion_present)
    blur_levels = Counter(s.blur_level for s in specs if s.blur_present)
    return {
        "count": n,
        "blur_rate": sum(s.blur_present for s in specs) / n,
        "occlusion_rate": sum(s.occlusion_present for s in specs) / n,
        "distractor_rate": sum(s.distractor for s in specs) / n,
        "transparency_levels": dict(sorted(transparency.items())),
        "rotation_levels": dict(sorted(rotation.items())),
        "blur_levels": dict(sorted(blur_levels.items())),
        "occlusion_stripes": dict(sorted(stripes.items())),
    }
