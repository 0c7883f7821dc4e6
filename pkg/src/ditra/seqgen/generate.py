# seqgen/generate.py
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ditra.seqgen.attributes import (
    AttributeSpec,
    DistractorMode,
    attribute_statistics,
    sample_attributes,
    sweep_attributes,
)
from ditra.seqgen.backgrounds import BackgroundSource, ProceduralBackgrounds, draw_background_ids
from ditra.seqgen.dataset_io import write_sequence
from ditra.seqgen.render import render_sequence
from ditra.workers import run_in_workers


def plan_specs(
    count: int,
    seed: int,
    backgrounds: BackgroundSource,
    frame_count: int = 40,
    frame_size: Sequence[int] = (240, 320),
    opaque: bool = False,
    distractor_mode: DistractorMode = "follow",
    sweep: Optional[str] = None,
) -> List[Tuple[str, AttributeSpec]]:
    """
    Decide every sequence up front from one seeded generator, so the dataset
    does not depend on how many workers render it.
    """
    rng = np.random.default_rng(seed)
    background_ids = draw_background_ids(backgrounds.ids(), count, rng)

    specs: List[AttributeSpec] = []
    for background_id in background_ids:
        if sweep is not None:
            specs.extend(
                sweep_attributes(sweep, rng, frame_count=frame_count, background_id=background_id, frame_size=frame_size)
            )
        else:
            specs.append(
                sample_attributes(
                    rng,
                    frame_count=frame_count,
                    background_id=background_id,
                    opaque=opaque,
                    distractor_mode=distractor_mode,
                    frame_size=frame_size,
                    # the crossing suite is about distractors, so every sequence gets one
                    force_distractor=True if distractor_mode == "crossing" else None,
                )
            )
    return [(f"seq-{i:04d}", spec) for i, spec in enumerate(specs)]


async def generate_dataset(
    root: Path,
    count: int,
    seed: int,
    workers: int = 4,
    backgrounds: Optional[BackgroundSource] = None,
    frame_count: int = 40,
    frame_size: Sequence[int] = (240, 320),
    opaque: bool = False,
    distractor_mode: DistractorMode = "follow",
    sweep: Optional[str] = None,
) -> Dict[str, object]:
    """Render and write `count` sequences (or sweeps) under `root`; returns attribute statistics."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    backgrounds = backgrounds or ProceduralBackgrounds(seed=seed)

    plan = plan_specs(
        count,
        seed,
        backgrounds,
        frame_count=frame_count,
        frame_size=frame_size,
        opaque=opaque,
        distractor_mode=distractor_mode,
        sweep=sweep,
    )
    logging.info(f"Generating {len(plan)} sequence(s) into {root} with {workers} worker(s)")

    def render_one(job: Tuple[str, AttributeSpec]) -> Path:
        seq_id, spec = job
        record = render_sequence(spec, backgrounds, seq_id=seq_id)
        return write_sequence(record, root)

    await run_in_workers(plan, render_one, workers)

    stats = attribute_statistics(spec for _, spec in plan)
    logging.info(f"Attribute statistics: {stats}")
    return stats
