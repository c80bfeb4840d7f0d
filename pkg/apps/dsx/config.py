"""
Network hyper-parameters.
"""
import attrs

from apps.common.exceptions import ArgumentError
from apps.scenes.sectors import check_sector_count
from apps.signal_core.framing import FrameSpec


def _positive(instance, attribute, value):
    if value < 1:
        raise ArgumentError(f'{attribute.name} must be at least 1, got {value}')


@attrs.frozen
class NetConfig:
    """
    Shape of one extraction network.

    One chunk of ``chunk_samples`` yields exactly one analysis frame, and the
    frame reaches ``lookahead_samples`` past the chunk, so the lookahead must
    equal the frame's padding.
    """

    n_sectors: int = attrs.field(default=6)
    chunk_samples: int = attrs.field(default=192, validator=_positive)
    lookahead_samples: int = attrs.field(default=96)
    window_len: int = attrs.field(default=288, validator=_positive)
    embed_channels: int = attrs.field(default=16, validator=_positive)
    n_blocks: int = attrs.field(default=2, validator=_positive)
    freq_downsample: int = attrs.field(default=4, validator=_positive)
    blstm_hidden: int = attrs.field(default=32, validator=_positive)
    causal_lstm_hidden: int = attrs.field(default=32, validator=_positive)
    angle_hidden: int = attrs.field(default=32, validator=_positive)

    @n_sectors.validator
    def _check_sectors(self, attribute, value):
        check_sector_count(value)

    def __attrs_post_init__(self):
        if self.lookahead_samples != self.window_len - self.chunk_samples:
            raise ArgumentError(
                f'lookahead {self.lookahead_samples} must equal window {self.window_len} '
                f'minus chunk {self.chunk_samples}'
            )
        if self.freq_downsample > self.bins:
            raise ArgumentError(f'freq_downsample {self.freq_downsample} exceeds {self.bins} bins')

    @property
    def frame(self):
        return FrameSpec(self.window_len, self.chunk_samples)

    @property
    def bins(self):
        return self.window_len // 2 + 1

    @property
    def latency_samples(self):
        return self.chunk_samples + self.lookahead_samples

    def as_dict(self):
        return attrs.asdict(self)

    @classmethod
    def from_dict(cls, document):
        known = {f.name for f in attrs.fields(cls)}
        unknown = sorted(set(document) - known)
        if unknown:
            raise ArgumentError(f'unknown network fields {unknown}')
        return cls(**document)
