"""
Tiny networks and in-memory datasets for tests.
"""
import attrs
import numpy as np

from apps.features.normalization import NormStats
from apps.signal_core.audio import AudioBuffer

from .checkpoint import Checkpoint
from .config import NetConfig
from .network import DSXNet

TINY = NetConfig(
    n_sectors=6,
    chunk_samples=8,
    lookahead_samples=8,
    window_len=16,
    embed_channels=3,
    n_blocks=1,
    freq_downsample=2,
    blstm_hidden=3,
    causal_lstm_hidden=3,
    angle_hidden=4,
)


def tiny_checkpoint(seed=0, config=TINY, stats=None):
    """Untrained checkpoint of ``config`` with neutral statistics."""
    model = DSXNet(config, seed)
    stats = stats if stats is not None else NormStats.neutral(config.bins)
    return Checkpoint.from_model(model, stats, {'seed': seed})


@attrs.define
class MemoryManifest:
    """Manifest stand-in holding records with their audio inline."""

    records: list

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def load_mixture(self, record):
        return AudioBuffer(record['mixture'])

    def load_target(self, record):
        return AudioBuffer(record['target'])


def memory_record(index, length=400, n_sectors=6, selected=0b1, target_present=True, seed=0,
                  interferer_gain=0.03):
    """
    One synthetic record: the target reaches the second channel delayed and
    attenuated, plus a weaker uncorrelated interferer on both channels
    scaled by ``interferer_gain``.
    """
    rng = np.random.default_rng([seed, index])
    target = rng.standard_normal(length) * 0.1 if target_present else np.zeros(length)
    interferer = rng.standard_normal((2, length)) * interferer_gain
    mixture = np.stack([target, 0.7 * np.roll(target, 2)]) + interferer
    return {
        'id': f'mem-{index:04d}',
        'n_sectors': n_sectors,
        'selected_sectors': selected,
        'target_present': target_present,
        'mixture': mixture,
        'target': target,
    }
