"""
Training loss.

Records with a target in the selected area use negative SI-SDR; records
without one (silent ground truth) use a weighted mean absolute error.
"""
import numpy as np

from apps.autodiff import ops
from apps.autodiff.tensor import as_tensor
from apps.common.exceptions import DegenerateSignalError, ShapeError

SILENT_WEIGHT = 50.0
ENERGY_FLOOR = 1e-12
RATIO_RANGE = (1e-10, 1e10)
RESIDUAL_GUARD = 1e-30


def si_sdr_loss(est, target, target_present, weight=SILENT_WEIGHT):
    """
    Args:
        est: Estimate Tensor (length,)
        target: Ground-truth array (length,)
        target_present: Whether ``target`` holds speech
        weight: Scale of the silent-target L1 branch

    Returns:
        Tensor: scalar; the SI-SDR branch lies in [-100, 100]

    Raises:
        ShapeError: Lengths differ
        DegenerateSignalError: Silent target with target_present set
    """
    est = as_tensor(est)
    target = np.asarray(target, dtype=np.float64)
    if est.shape != target.shape:
        raise ShapeError(f'estimate {est.shape} and target {target.shape} differ')
    if not target_present:
        return ops.mean(ops.abs(est - target)) * weight
    energy = float(np.dot(target, target))
    if energy == 0.0:
        raise DegenerateSignalError('target is silent but marked present')
    alpha = ops.sum(est * target) / max(energy, ENERGY_FLOOR)
    projection = alpha * target
    residual = projection - est
    ratio = ops.sum(projection * projection) / (ops.sum(residual * residual) + RESIDUAL_GUARD)
    return ops.log10_safe(ops.clip(ratio, *RATIO_RANGE)) * -10.0
