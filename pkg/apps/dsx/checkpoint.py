"""
Checkpoint file format.

Little-endian layout::

    magic  b'SSDX'
    u32    format version
    u32    header length, then the canonical JSON header
           {"metadata": {...}, "net": {...}, "norm": {"count", "epsilon"}}
    u32    tensor count, then per tensor in lexicographic name order:
           u16 name length, UTF-8 name, u8 ndim, u32 dims[ndim], f32 data

Normalization statistics are stored as the tensors ``norm.mean`` and
``norm.var``. Writing a loaded checkpoint reproduces the file byte for byte.
"""
import functools
import json
import logging
import struct
from pathlib import Path

import attrs
import numpy as np

from apps.common.exceptions import CompatibilityError
from apps.common.files import canonical_json
from apps.features.normalization import NormStats

from .config import NetConfig

logger = logging.getLogger(__name__)

MAGIC = b'SSDX'
VERSION = 1
NORM_TENSORS = ('norm.mean', 'norm.var')


def _as_f32(value):
    return np.ascontiguousarray(value, dtype='<f4')


@attrs.frozen(eq=False)
class Checkpoint:
    config: NetConfig
    stats: NormStats
    tensors: dict = attrs.field(converter=lambda d: {k: _as_f32(d[k]) for k in sorted(d)})
    metadata: dict = attrs.Factory(dict)

    @classmethod
    def from_model(cls, model, stats, metadata=None):
        return cls(config=model.config, stats=stats, tensors=model.parameter_arrays(), metadata=metadata or {})

    @functools.cached_property
    def model(self):
        """Network with the stored weights; built once per checkpoint."""
        from .network import DSXNet

        net = DSXNet(self.config)
        net.load_parameters(self.tensors)
        return net

    def check_sectors(self, n_sectors):
        if n_sectors != self.config.n_sectors:
            raise CompatibilityError(
                f'checkpoint is trained for {self.config.n_sectors} sectors, not {n_sectors}'
            )

    def to_bytes(self):
        header = canonical_json({
            'metadata': self.metadata,
            'net': self.config.as_dict(),
            'norm': {'count': int(self.stats.count), 'epsilon': float(self.stats.epsilon)},
        }).encode('utf-8')
        tensors = dict(self.tensors)
        tensors['norm.mean'] = _as_f32(self.stats.mean)
        tensors['norm.var'] = _as_f32(self.stats.var)
        parts = [MAGIC, struct.pack('<II', VERSION, len(header)), header, struct.pack('<I', len(tensors))]
        for name in sorted(tensors):
            data = tensors[name]
            encoded = name.encode('utf-8')
            parts.append(struct.pack('<H', len(encoded)) + encoded)
            parts.append(struct.pack(f'<B{data.ndim}I', data.ndim, *data.shape))
            parts.append(data.tobytes())
        return b''.join(parts)

    @classmethod
    def from_bytes(cls, raw):
        """
        Raises:
            CompatibilityError: Bad magic or version, or lengths that do not add up
        """
        reader = _Reader(raw)
        if reader.take(4) != MAGIC:
            raise CompatibilityError('not a checkpoint: bad magic')
        version, header_len = reader.unpack('<II')
        if version != VERSION:
            raise CompatibilityError(f'checkpoint version {version} is not supported (expected {VERSION})')
        try:
            header = json.loads(reader.take(header_len).decode('utf-8'))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CompatibilityError(f'checkpoint header is corrupt: {exc}') from exc
        (count,) = reader.unpack('<I')
        tensors = {}
        for _ in range(count):
            (name_len,) = reader.unpack('<H')
            name = reader.take(name_len).decode('utf-8', errors='replace')
            (ndim,) = reader.unpack('<B')
            dims = reader.unpack(f'<{ndim}I')
            size = int(np.prod(dims, dtype=np.int64))
            tensors[name] = np.frombuffer(reader.take(4 * size), dtype='<f4').reshape(dims).copy()
        if reader.remaining:
            raise CompatibilityError(f'{reader.remaining} unexpected bytes after the last tensor')
        missing = [n for n in NORM_TENSORS if n not in tensors]
        if missing:
            raise CompatibilityError(f'checkpoint lacks {missing}')
        try:
            config = NetConfig.from_dict(header['net'])
            stats = NormStats(mean=tensors.pop('norm.mean'), var=tensors.pop('norm.var'),
                              epsilon=header['norm']['epsilon'], count=header['norm']['count'])
        except (KeyError, TypeError, ValueError) as exc:
            raise CompatibilityError(f'checkpoint header does not describe a network: {exc}') from exc
        return cls(config=config, stats=stats, tensors=tensors, metadata=header.get('metadata', {}))


class _Reader:

    def __init__(self, raw):
        self.raw = bytes(raw)
        self.offset = 0

    @property
    def remaining(self):
        return len(self.raw) - self.offset

    def take(self, n):
        if n < 0 or n > self.remaining:
            raise CompatibilityError(
                f'checkpoint truncated or corrupt: need {n} bytes at offset {self.offset}, {self.remaining} left'
            )
        chunk = self.raw[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def save_checkpoint(checkpoint, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(checkpoint.to_bytes())
    logger.info(f'Saved checkpoint {path} ({len(checkpoint.tensors)} tensors)')
    return path


def load_checkpoint(path, n_sectors=None):
    """
    Read a checkpoint and, when ``n_sectors`` is given, check it matches.

    Raises:
        CompatibilityError: Bad file, or trained for another sector count
        OSError: The file cannot be read
    """
    checkpoint = Checkpoint.from_bytes(Path(path).read_bytes())
    if n_sectors is not None:
        checkpoint.check_sectors(n_sectors)
    checkpoint.model  # raises on mismatched tensor names or shapes
    logger.debug(f'Loaded checkpoint {path}')
    return checkpoint
