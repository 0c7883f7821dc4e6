from ditra.geom.boxes import (
    BoundingBox,
    boxes_to_array,
    center_error,
    giou,
    giou_loss,
    iou,
    l1_box_loss,
)
from ditra.geom.crop import CropTransform, crop_resize, crop_square
from ditra.geom.masks import BinaryMask, mask_bounding_box, rasterize_box, two_channel_mask

__all__ = [
    "BoundingBox",
    "BinaryMask",
    "CropTransform",
    "boxes_to_array",
    "center_error",
    "crop_resize",
    "crop_square",
    "giou",
    "giou_loss",
    "iou",
    "l1_box_loss",
    "mask_bounding_box",
    "rasterize_box",
    "two_channel_mask",
]
