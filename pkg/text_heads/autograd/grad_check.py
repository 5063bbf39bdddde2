"""
Central finite-difference check of analytic gradients
"""
import logging
from typing import Callable, Dict, Mapping, Optional, Sequence, Union

import numpy as np

from ..constants import GRAD_CHECK_EPS, GRAD_CHECK_FLOOR, GRAD_CHECK_TOLERANCE
from ..exceptions import NumericError
from .rng import Rng
from .tensor import Tensor, no_grad


__all__ = ['grad_check']


logger = logging.getLogger(__name__)


def _named(params: Union[Sequence[Tensor], Mapping[str, Tensor]]) -> Dict[str, Tensor]:
    if isinstance(params, Mapping):
        return dict(params)
    return {(tensor.name or f'param{idx}'): tensor for idx, tensor in enumerate(params)}


def _central_difference(func: Callable[[], Tensor], flat: np.ndarray, coord: int, eps: float, name: str) -> float:
    original = flat[coord]
    with no_grad():
        flat[coord] = original + eps
        upper = func().item()
        flat[coord] = original - eps
        lower = func().item()
    flat[coord] = original
    if not (np.isfinite(upper) and np.isfinite(lower)):
        raise NumericError(f'Non-finite value while checking {name}[{coord}]')
    return (upper - lower) / (2.0 * eps)


def _relative(a: float, b: float, floor: float) -> float:
    return abs(a - b) / max(floor, abs(a) + abs(b))


def grad_check(
    func: Callable[[], Tensor],
    params: Union[Sequence[Tensor], Mapping[str, Tensor]],
    eps: float = GRAD_CHECK_EPS,
    max_coords: Optional[int] = None,
    rng: Optional[Rng] = None,
    floor: float = GRAD_CHECK_FLOOR,
    skip_nonsmooth: bool = False
) -> float:
    """
    compare backward against (f(theta + eps) - f(theta - eps)) / (2 * eps), coordinate by coordinate
    :param func: deterministic function under test returning a scalar tensor, dropout in eval mode
    :param params: tensors to differentiate against, by name or position
    :param eps: finite-difference step
    :param max_coords: perturb at most this many coordinates per tensor, picked by rng; None perturbs all
    :param rng: generator choosing the perturbed coordinates
    :param floor: lower bound of the normalisation |analytic| + |numeric|
    :param skip_nonsmooth: leave out coordinates where the eps and eps / 2 estimates disagree,
                           i.e. a relu or max kink lies inside the step
    :return: worst |analytic - numeric| / max(floor, |analytic| + |numeric|)
    """
    named = _named(params)
    for tensor in named.values():
        tensor.zero_grad()
    loss = func()
    loss.backward()
    analytic = {
        name: (tensor.grad.copy() if tensor.grad is not None else np.zeros(tensor.shape))
        for name, tensor in named.items()
    }
    if rng is None:
        rng = Rng(0)

    worst = 0.0
    skipped = 0
    for name, tensor in named.items():
        # perturbations must write through to the tensor
        tensor.data = np.ascontiguousarray(tensor.data)
        flat = tensor.data.reshape(-1)
        coords: Sequence[int] = range(flat.size)
        if max_coords is not None and flat.size > max_coords:
            coords = sorted(rng.permutation(flat.size)[:max_coords])
        flat_analytic = analytic[name].reshape(-1)
        for coord in coords:
            if not np.isfinite(flat_analytic[coord]):
                raise NumericError(f'Non-finite gradient while checking {name}[{coord}]')
            numeric = _central_difference(func, flat, coord, eps, name)
            if skip_nonsmooth:
                refined = _central_difference(func, flat, coord, eps / 2.0, name)
                if _relative(numeric, refined, floor) > GRAD_CHECK_TOLERANCE:
                    skipped += 1
                    continue
            error = _relative(flat_analytic[coord], numeric, floor)
            if error > worst:
                worst = error
                logger.debug(f'{name}[{coord}]: analytic {flat_analytic[coord]}, numeric {numeric}')
    if skipped:
        logger.debug(f'Skipped {skipped} coordinates sitting on a kink')
    return float(worst)
