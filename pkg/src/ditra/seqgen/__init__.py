from ditra.seqgen.attributes import AttributeSpec, attribute_statistics, sample_attributes, sweep_attributes
from ditra.seqgen.backgrounds import DirectoryBackgrounds, ProceduralBackgrounds, draw_background_ids
from ditra.seqgen.compositing import apply_motion_blur, composite_target, render_occlusion
from ditra.seqgen.dataset_io import read_dataset, read_sequence, write_dataset, write_sequence
from ditra.seqgen.generate import generate_dataset
from ditra.seqgen.render import SequenceRecord, render_sequence
from ditra.seqgen.trajectory import Trajectory, hermite_trajectory

__all__ = [
    "AttributeSpec",
    "DirectoryBackgrounds",
    "ProceduralBackgrounds",
    "SequenceRecord",
    "Trajectory",
    "apply_motion_blur",
    "attribute_statistics",
    "composite_target",
    "draw_background_ids",
    "generate_dataset",
    "hermite_trajectory",
    "read_dataset",
    "read_sequence",
    "render_occlusion",
    "render_sequence",
    "sample_attributes",
    "sweep_attributes",
    "write_dataset",
    "write_sequence",
]
