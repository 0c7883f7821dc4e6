# model/positional.py
import math
from typing import Dict, Tuple

import torch

_TABLES: Dict[Tuple, torch.Tensor] = {}


def sine_embedding(
    height: int,
    width: int,
    channels: int,
    device: torch.device = torch.device("cpu"),
    dtype: torch.dtype = torch.float32,
    temperature: float = 10000.0,
) -> torch.Tensor:
    """
    Normalised 2D sine positional table of shape (H * W, C); half the channels
    encode y, half encode x. One table per (size, channels) is shared by every
    user.
    """
    key = (height, width, channels, str(device), dtype)
    table = _TABLES.get(key)
    if table is not None:
        return table

    num_feats = channels // 2
    eps = 1e-6
    scale = 2 * math.pi
    y_embed = torch.arange(1, height + 1, dtype=torch.float64, device=device)[:, None].expand(height, width)
    x_embed = torch.arange(1, width + 1, dtype=torch.float64, device=device)[None, :].expand(height, width)
    y_embed = y_embed / (height + eps) * scale
    x_embed = x_embed / (width + eps) * scale

    dim_t = torch.arange(num_feats, dtype=torch.float64, device=device)
    dim_t = temperature ** (2 * (dim_t // 2) / num_feats)

    pos_x = x_embed[..., None] / dim_t
    pos_y = y_embed[..., None] / dim_t
    pos_x = torch.stack((pos_x[..., 0::2].sin(), pos_x[..., 1::2].cos()), dim=3).flatten(2)
    pos_y = torch.stack((pos_y[..., 0::2].sin(), pos_y[..., 1::2].cos()), dim=3).flatten(2)
    table = torch.cat((pos_y, pos_x), dim=2).reshape(height * width, channels).to(dtype)

    _TABLES[key] = table
    return table
