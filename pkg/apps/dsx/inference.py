"""
Offline extraction with a trained checkpoint.
"""
import numpy as np

from apps.autodiff.tensor import no_grad
from apps.common.exceptions import ShapeError

from .network import estimate


def forward_offline(audio, query, checkpoint):
    """
    Extract the selected-sector target from a whole (2, length) mixture.

    Returns:
        ndarray: (length,) estimate at the reference microphone

    Raises:
        CompatibilityError: Query and checkpoint use different sector counts
        SizeError: Audio shorter than one frame
    """
    audio = np.asarray(audio, dtype=np.float64)
    if audio.ndim != 2 or audio.shape[0] != 2:
        raise ShapeError(f'mixtures are (2, length), got {audio.shape}')
    checkpoint.check_sectors(query.n_sectors)
    with no_grad():
        return estimate(checkpoint.model, checkpoint.stats, audio, query).data.copy()
