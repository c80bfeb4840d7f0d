"""
Array geometry and far-field steering vectors.

Positions are in the device frame (metres, relative to the microstructure
mic, x axis along the 0 degree direction). Delays are taken relative to the
array centroid, so a plane wave's steering vector is pure phase.
"""
import attrs
import numpy as np
from django.conf import settings
from scipy.spatial.distance import pdist

from apps.common.exceptions import ArgumentError

MAX_MICS = 6
MAX_APERTURE = 0.2
MIN_SPACING = 1e-6
NYQUIST = 12000.0


def _as_positions(value):
    positions = np.asarray(value, dtype=np.float64)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise ArgumentError(f'mic positions must be (M, 3), got {positions.shape}')
    return positions


@attrs.frozen(eq=False)
class ArrayGeometry:
    """
    Up to six microphones within a 0.2 m aperture.

    A single microphone is accepted as the degenerate case where every
    beamformer reduces to the identity.
    """

    positions: np.ndarray = attrs.field(converter=_as_positions)

    def __attrs_post_init__(self):
        if not 1 <= self.count <= MAX_MICS:
            raise ArgumentError(f'arrays hold 1 to {MAX_MICS} mics, got {self.count}')
        if self.count > 1:
            distances = pdist(self.positions)
            if distances.min() < MIN_SPACING:
                raise ArgumentError('mic positions must be distinct')
            if distances.max() > MAX_APERTURE + 1e-12:
                raise ArgumentError(f'aperture {distances.max():.3f} m exceeds {MAX_APERTURE} m')

    @property
    def count(self):
        return self.positions.shape[0]

    @property
    def centroid(self):
        return self.positions.mean(axis=0)

    @property
    def aperture(self):
        return float(pdist(self.positions).max()) if self.count > 1 else 0.0

    def subset(self, n_mics):
        """The first ``n_mics`` microphones."""
        return ArrayGeometry(self.positions[:n_mics])

    @classmethod
    def from_record(cls, record, n_mics=None):
        """Array of a manifest record, cut to its first ``n_mics`` microphones when given."""
        if not record.get('array_geometry'):
            raise ArgumentError(f"{record['id']} has no array geometry")
        geometry = cls(record['array_geometry'])
        return geometry.subset(n_mics) if n_mics else geometry

    @classmethod
    def circular(cls, n_mics=4, radius=0.05):
        """Uniform circular array in the horizontal plane, first mic on the 0 degree axis."""
        headings = 2.0 * np.pi * np.arange(n_mics) / n_mics
        return cls(np.stack([radius * np.cos(headings), radius * np.sin(headings), np.zeros(n_mics)], axis=1))

    def delays(self, theta_deg, speed_of_sound=None):
        """
        Arrival time of a plane wave from azimuth ``theta_deg`` at each mic,
        relative to the centroid; mics nearer the source hear it first.
        """
        c = speed_of_sound or settings.SIEVE_LAB['SPEED_OF_SOUND']
        theta = np.deg2rad(theta_deg)
        direction = np.array([np.cos(theta), np.sin(theta), 0.0])
        return -(self.positions - self.centroid) @ direction / c


def steering_vector(geometry, theta_deg, freqs, speed_of_sound=None):
    """
    a_m(f) = exp(-j 2 pi f tau_m(theta)).

    Args:
        geometry: ArrayGeometry
        theta_deg: Look azimuth in the device frame
        freqs: Scalar frequency or array of frequencies in Hz, at most 12 kHz

    Returns:
        ndarray: (M,) for a scalar frequency, else (F, M)
    """
    freqs = np.asarray(freqs, dtype=np.float64)
    if np.any(freqs < 0.0) or np.any(freqs > NYQUIST):
        raise ArgumentError(f'frequencies must lie in [0, {NYQUIST}] Hz')
    tau = geometry.delays(theta_deg, speed_of_sound)
    return np.exp(-2j * np.pi * freqs[..., np.newaxis] * tau)
