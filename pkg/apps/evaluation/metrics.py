"""
Scale-invariant signal-to-distortion ratio.

The metric is the negated SI-SDR branch of the training loss, evaluated
without recording gradients, so reports and training share one formula
and one clamp.
"""
import numpy as np

from apps.autodiff.tensor import no_grad
from apps.dsx.loss import si_sdr_loss

SI_SDR_RANGE_DB = (-100.0, 100.0)


def si_sdr(est, ref):
    """
    SI-SDR of ``est`` against ``ref`` in dB, clamped to [-100, 100].

    Raises:
        DegenerateSignalError: ``ref`` is all zeros
        ShapeError: Lengths differ
    """
    with no_grad():
        loss = si_sdr_loss(np.asarray(est, dtype=np.float64), ref, target_present=True)
    return -float(loss.data)
