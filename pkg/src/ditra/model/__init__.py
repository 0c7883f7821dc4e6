from ditra.model.checkpoint import load_checkpoint, save_checkpoint
from ditra.model.config import ModelConfig
from ditra.model.encoder import ImageEncoder, iem_encode, preprocess_patches
from ditra.model.network import DiTraNetwork, NetworkOutput, TemplateInput
from ditra.model.types import FeatureGrid, TemplateFeatures

__all__ = [
    "DiTraNetwork",
    "FeatureGrid",
    "ImageEncoder",
    "ModelConfig",
    "NetworkOutput",
    "TemplateFeatures",
    "TemplateInput",
    "iem_encode",
    "load_checkpoint",
    "preprocess_patches",
    "save_checkpoint",
]
