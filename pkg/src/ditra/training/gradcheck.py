# training/gradcheck.py
from typing import Callable, Sequence

import numpy as np
import torch


def finite_difference_check(
    fn: Callable[[], torch.Tensor],
    params: Sequence[torch.Tensor],
    samples: int = 20,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """
    Compare autograd gradients of the scalar `fn()` with central differences
    at `samples` randomly chosen parameter entries. Returns the largest
    relative error. Run it on float64 parameters.
    """
    params = [p for p in params if p.requires_grad]
    for p in params:
        p.grad = None
    fn().backward()
    # parameters off the graph of `fn` have a zero gradient
    analytic = [torch.zeros_like(p) if p.grad is None else p.grad.detach().clone() for p in params]

    rng = np.random.default_rng(seed)
    sizes = np.array([p.numel() for p in params])
    worst = 0.0
    with torch.no_grad():
        for _ in range(samples):
            which = int(rng.choice(len(params), p=sizes / sizes.sum()))
            index = int(rng.integers(sizes[which]))
            flat = params[which].view(-1)
            original = flat[index].item()

            flat[index] = original + step
            plus = fn().item()
            flat[index] = original - step
            minus = fn().item()
            flat[index] = original

            numeric = (plus - minus) / (2 * step)
            exact = analytic[which].view(-1)[index].item()
            scale = max(abs(numeric), abs(exact), 1e-6)
            worst = max(worst, abs(numeric - exact) / scale)
    return worst
