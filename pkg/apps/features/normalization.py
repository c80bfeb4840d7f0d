"""
Per-frequency normalization statistics for the spatial feature channels.

Statistics are accumulated record by record with the pairwise (Chan et
al.) update of count, mean and centred sum of squares, so one pass over the
manifest suffices and long datasets do not lose precision.
"""
import logging

import attrs
import numpy as np

from apps.common.exceptions import ResourceError, ShapeError
from apps.common.files import write_csv
from apps.features.spatial import SPATIAL_CHANNELS, mixture_spectra, spatial_features
from apps.signal_core.framing import DEFAULT_FRAME

logger = logging.getLogger(__name__)

EPSILON = 1e-5


@attrs.frozen(eq=False)
class NormStats:
    """Mean and population variance, each (3, bins), of cos IPD, sin IPD and ILD."""

    mean: np.ndarray = attrs.field(converter=lambda v: np.asarray(v, dtype=np.float64))
    var: np.ndarray = attrs.field(converter=lambda v: np.asarray(v, dtype=np.float64))
    epsilon: float = EPSILON
    count: int = 0

    def __attrs_post_init__(self):
        if self.mean.shape != self.var.shape or self.mean.ndim != 2 or self.mean.shape[0] != 3:
            raise ShapeError(f'stats must be (3, bins), got {self.mean.shape} and {self.var.shape}')

    @property
    def bins(self):
        return self.mean.shape[1]

    @classmethod
    def neutral(cls, bins):
        """Zero mean, unit variance: normalization leaves features unchanged up to epsilon."""
        return cls(mean=np.zeros((3, bins)), var=np.ones((3, bins)) - EPSILON)

    def normalize(self, spatial):
        """
        Args:
            spatial: (3, bins, frames) unnormalized spatial features

        Raises:
            ShapeError: If the bin count differs
        """
        if spatial.shape[:2] != self.mean.shape:
            raise ShapeError(f'features {spatial.shape} do not match stats over {self.bins} bins')
        scale = np.sqrt(self.var + self.epsilon)
        return (spatial - self.mean[..., np.newaxis]) / scale[..., np.newaxis]

    def as_dict(self):
        return {
            'mean': self.mean.tolist(),
            'var': self.var.tolist(),
            'epsilon': self.epsilon,
            'count': self.count,
        }

    @classmethod
    def from_dict(cls, document):
        return cls(mean=document['mean'], var=document['var'],
                   epsilon=document.get('epsilon', EPSILON), count=document.get('count', 0))

    def csv_rows(self):
        for b in range(self.bins):
            for k, name in enumerate(SPATIAL_CHANNELS):
                yield b, name, float(self.mean[k, b]), float(self.var[k, b])

    def write_csv(self, path):
        return write_csv(path, ['bin', 'feature', 'mean', 'var'], self.csv_rows())


@attrs.define
class RunningMoments:
    """Streaming per-(feature, bin) count, mean and centred sum of squares."""

    count: int = 0
    mean: np.ndarray = None
    m2: np.ndarray = None

    def update(self, batch):
        """
        Merge a (3, bins, frames) batch.
        """
        n_b = batch.shape[-1]
        if n_b == 0:
            return
        mean_b = batch.mean(axis=-1)
        m2_b = ((batch - mean_b[..., np.newaxis]) ** 2).sum(axis=-1)
        if self.count == 0:
            self.count, self.mean, self.m2 = n_b, mean_b, m2_b
            return
        if mean_b.shape != self.mean.shape:
            raise ShapeError(f'batch over {mean_b.shape} does not match running {self.mean.shape}')
        total = self.count + n_b
        delta = mean_b - self.mean
        self.mean = self.mean + delta * (n_b / total)
        self.m2 = self.m2 + m2_b + delta ** 2 * (self.count * n_b / total)
        self.count = total

    def stats(self, epsilon=EPSILON):
        return NormStats(mean=self.mean, var=self.m2 / self.count, epsilon=epsilon, count=self.count)


def fit_norm_stats(manifest, frame_spec=DEFAULT_FRAME, max_records=None):
    """
    Fit normalization statistics over the first ``max_records`` mixtures.

    Args:
        manifest: Manifest (records in id order)
        frame_spec: Frame geometry of the features
        max_records: Record limit; None or a larger value uses every record

    Raises:
        ResourceError: If the manifest holds no records
    """
    records = list(manifest)
    if max_records is not None:
        records = records[:max_records]
    if not records:
        raise ResourceError('cannot fit normalization statistics on an empty manifest')
    moments = RunningMoments()
    for record in records:
        x1, x2 = mixture_spectra(manifest.load_mixture(record), frame_spec)
        moments.update(spatial_features(x1, x2))
    logger.info(f'Fitted normalization statistics over {len(records)} records, {moments.count} frames')
    return moments.stats()
