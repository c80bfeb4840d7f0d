"""
Chunked real-time extraction.

Each chunk of T new samples completes one analysis frame (the frame reaches
sigma = window - T samples back into the previous chunk). One frame of
synthesis finishes T output samples, so the stream runs T + sigma samples
behind its input: output sample n + sigma of the stream equals offline
output sample n.
"""
import logging
import time

import attrs
import numpy as np

from apps.autodiff.tensor import Tensor, no_grad
from apps.common.exceptions import ArgumentError, CompatibilityError, FormatError, ShapeError
from apps.features.spatial import encode_features

from .network import activity_gate, synthesis_frames

logger = logging.getLogger(__name__)


@attrs.frozen(eq=False)
class StreamState:
    """
    Everything carried between chunks.

    pending: (2, sigma) input samples the next frame reaches back into
    lstm_states: per block causal LSTM (h, c) arrays, None before the first frame
    tail: synthesis overlap still owed to later outputs
    """

    query: object
    embedding: np.ndarray
    pending: np.ndarray
    tail: np.ndarray
    lstm_states: tuple = None
    frames: int = 0
    finished: bool = False
    flushed: bool = False


def start_stream(checkpoint, query):
    checkpoint.check_sectors(query.n_sectors)
    frame_spec = checkpoint.config.frame
    with no_grad():
        embedding = checkpoint.model.encode_angle(query).data
    return StreamState(
        query=query,
        embedding=embedding,
        pending=np.zeros((2, frame_spec.pad)),
        tail=np.zeros(frame_spec.window_len - frame_spec.hop),
    )


def stream_step(chunk, query, state, checkpoint, final=False):
    """
    Process one chunk of T samples per channel.

    Args:
        chunk: (2, T) array; with ``final`` a shorter chunk is zero-padded
        query: Must equal the query the stream was started with
        final: Marks the last chunk; only ``stream_flush`` may follow

    Returns:
        tuple: (T,) output samples and the next state

    Raises:
        ArgumentError: Wrong chunk length
        CompatibilityError: Query changed mid-stream, or the stream is finished
    """
    if state.finished:
        raise CompatibilityError('the stream has finished; start a new one')
    if query != state.query:
        raise CompatibilityError('the query changed mid-stream; start a new stream for the new query')
    frame_spec = checkpoint.config.frame
    hop = frame_spec.hop
    chunk = np.asarray(chunk, dtype=np.float64)
    if chunk.ndim != 2 or chunk.shape[0] != 2:
        raise ShapeError(f'chunks are (2, {hop}), got {chunk.shape}')
    if chunk.shape[1] != hop:
        if not (final and 0 < chunk.shape[1] < hop):
            raise ArgumentError(f'chunks hold {hop} samples per channel, got {chunk.shape[1]}')
        chunk = np.pad(chunk, ((0, 0), (0, hop - chunk.shape[1])))
    out, state = _advance(chunk, state, checkpoint)
    return out, attrs.evolve(state, finished=final)


def stream_flush(state, checkpoint):
    """Emit the sigma samples still owed after the last chunk, using silent input."""
    if state.flushed:
        raise CompatibilityError('the stream has already been flushed')
    frame_spec = checkpoint.config.frame
    out, state = _advance(np.zeros((2, frame_spec.hop)), state, checkpoint)
    return out[:frame_spec.pad], attrs.evolve(state, finished=True, flushed=True)


def _advance(chunk, state, checkpoint):
    frame_spec = checkpoint.config.frame
    model = checkpoint.model
    window = np.concatenate([state.pending, chunk], axis=1)
    spectra = np.fft.rfft(window * frame_spec.analysis_window, axis=-1)[:, :, np.newaxis]
    features = encode_features(spectra[0], spectra[1], checkpoint.stats).data
    states = None
    if state.lstm_states is not None:
        states = [(Tensor(h), Tensor(c)) for h, c in state.lstm_states]
    with no_grad():
        spectrum, new_states = model.forward_frames(
            features, activity_gate(spectra[0]), Tensor(state.embedding), states)
        frame = synthesis_frames(spectrum, frame_spec).data[0]
    overlap = frame_spec.window_len - frame_spec.hop
    frame = frame.copy()
    frame[:overlap] += state.tail
    next_state = attrs.evolve(
        state,
        pending=window[:, frame_spec.hop:],
        tail=frame[frame_spec.hop:],
        lstm_states=tuple((h.data, c.data) for h, c in new_states),
        frames=state.frames + 1,
    )
    return frame[:frame_spec.hop], next_state


def stream_audio(audio, query, checkpoint):
    """
    Stream a whole (2, length) mixture chunk by chunk.

    Returns:
        tuple: output aligned with offline processing (length,), per-chunk
        wall times in milliseconds
    """
    audio = np.asarray(audio, dtype=np.float64)
    hop = checkpoint.config.chunk_samples
    length = audio.shape[1]
    state = start_stream(checkpoint, query)
    outputs, timings = [], []
    starts = range(0, length, hop)
    for index, start in enumerate(starts):
        began = time.perf_counter()
        out, state = stream_step(audio[:, start:start + hop], query, state, checkpoint,
                                 final=index == len(starts) - 1)
        timings.append((time.perf_counter() - began) * 1000.0)
        outputs.append(out)
    tail, _ = stream_flush(state, checkpoint)
    outputs.append(tail)
    lookahead = checkpoint.config.lookahead_samples
    aligned = np.concatenate(outputs)[lookahead:lookahead + length]
    logger.info(f'Streamed {len(timings)} chunks, mean {np.mean(timings):.3f} ms per chunk')
    return aligned, np.asarray(timings)


def benchmark(checkpoint, query, n_chunks=1000, seed=0):
    """
    Mean and standard deviation of stream_step wall time over random chunks.
    """
    rng = np.random.default_rng(seed)
    hop = checkpoint.config.chunk_samples
    state = start_stream(checkpoint, query)
    timings = np.zeros(n_chunks)
    for i in range(n_chunks):
        chunk = rng.standard_normal((2, hop)) * 0.1
        began = time.perf_counter()
        _, state = stream_step(chunk, query, state, checkpoint)
        timings[i] = (time.perf_counter() - began) * 1000.0
    return {'chunks': n_chunks, 'mean_ms': float(timings.mean()), 'std_ms': float(timings.std())}


def read_interleaved(path):
    """
    Raw little-endian f32 samples, interleaved (ref, struct), as a (2, length) array.

    Raises:
        FormatError: Odd sample count
    """
    samples = np.fromfile(path, dtype='<f4')
    if samples.size % 2:
        raise FormatError(f'{path}: {samples.size} samples cannot be split into two channels')
    return samples.reshape(-1, 2).T.astype(np.float64)


def write_raw(path, samples):
    np.ascontiguousarray(samples, dtype='<f4').tofile(path)
    return path
