"""
Training loop.

Each record is paired with its own sector selection as the query. Epochs
shuffle the records, batches average the per-record loss, and Adam follows
a warmup / hold / step-decay learning-rate schedule. Everything random draws
from one seeded generator, so a seed reproduces the checkpoint byte for byte.
"""
import logging

import attrs
import numpy as np

from apps.autodiff.optim import Adam
from apps.autodiff.tensor import backward, no_grad
from apps.common.exceptions import ArgumentError, CompatibilityError, ResourceError
from apps.common.random import PRNG_ALGORITHM, make_rng
from apps.signal_core.audio import SAMPLE_RATE

from .angle import AngleQuery
from .checkpoint import Checkpoint
from .loss import SILENT_WEIGHT, si_sdr_loss
from .network import DSXNet, estimate

logger = logging.getLogger(__name__)

MIN_RECORDS = 8
SHUFFLE_STREAM = 11


@attrs.frozen
class TrainConfig:
    epochs: int = 40
    batch_size: int = 4
    lr_start: float = 5e-4
    lr_peak: float = 5e-3
    warmup_epochs: int = 10
    hold_epochs: int = 20
    decay: float = 0.95
    decay_every: int = 2
    augment_probability: float = 0.3
    max_shift_seconds: float = 0.25
    max_gain_db: float = 3.0
    silent_weight: float = SILENT_WEIGHT
    max_steps: int = None

    def __attrs_post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.decay_every < 1:
            raise ArgumentError('epochs, batch_size and decay_every must be at least 1')
        if not 0.0 <= self.augment_probability <= 1.0:
            raise ArgumentError(f'augment_probability must lie in [0, 1], got {self.augment_probability}')


def learning_rate(epoch, config):
    """
    Linear warmup over epochs [0, warmup], constant through warmup + hold,
    then multiplied by ``decay`` at every ``decay_every``-epoch boundary.
    """
    if epoch <= config.warmup_epochs:
        if config.warmup_epochs == 0:
            return config.lr_peak
        return config.lr_start + (config.lr_peak - config.lr_start) * epoch / config.warmup_epochs
    plateau_end = config.warmup_epochs + config.hold_epochs
    if epoch <= plateau_end:
        return config.lr_peak
    return config.lr_peak * config.decay ** ((epoch - plateau_end) // config.decay_every)


def augment(rng, mixture, target, config):
    """
    Circular time shift, then gain, each applied with ``augment_probability``.

    Both draws happen for every call so the generator advances identically.
    """
    shift_roll, shift_value = rng.random(), rng.uniform(-config.max_shift_seconds, config.max_shift_seconds)
    gain_roll, gain_value = rng.random(), rng.uniform(-config.max_gain_db, config.max_gain_db)
    if shift_roll < config.augment_probability:
        shift = int(round(shift_value * SAMPLE_RATE))
        mixture = np.roll(mixture, shift, axis=-1)
        target = np.roll(target, shift, axis=-1)
    if gain_roll < config.augment_probability:
        gain = 10.0 ** (gain_value / 20.0)
        mixture = mixture * gain
        target = target * gain
    return mixture, target


@attrs.frozen(eq=False)
class Example:
    record_id: str
    mixture: np.ndarray
    target: np.ndarray
    query: AngleQuery
    target_present: bool


def load_examples(manifest, n_sectors):
    """
    Raises:
        CompatibilityError: A record uses another sector count
    """
    examples = []
    for record in manifest:
        if record['n_sectors'] != n_sectors:
            raise CompatibilityError(
                f"{record['id']} uses {record['n_sectors']} sectors, the network {n_sectors}"
            )
        examples.append(Example(
            record_id=record['id'],
            mixture=manifest.load_mixture(record).data,
            target=manifest.load_target(record).data[0],
            query=AngleQuery(n_sectors=n_sectors, selected=record['selected_sectors']),
            target_present=record['target_present'],
        ))
    return examples


def example_loss(model, stats, mixture, target, example, silent_weight=SILENT_WEIGHT):
    est = estimate(model, stats, mixture, example.query)
    return si_sdr_loss(est, target, example.target_present, silent_weight)


def mean_loss(model, stats, examples, silent_weight=SILENT_WEIGHT):
    with no_grad():
        losses = [example_loss(model, stats, e.mixture, e.target, e, silent_weight).item() for e in examples]
    return float(np.mean(losses))


def train(manifest, stats, net_config, train_config, seed, valid_manifest=None):
    """
    Train a network on ``manifest``.

    Args:
        manifest: Training Manifest (or any iterable of records with loaders)
        stats: NormStats fitted on the training features
        net_config: NetConfig
        train_config: TrainConfig
        seed: Seed of initialization, shuffling and augmentation
        valid_manifest: Optional; the best-validation weights are kept

    Returns:
        Checkpoint

    Raises:
        ResourceError: The manifest holds no records
        CompatibilityError: Records or stats do not fit the network
    """
    examples = load_examples(manifest, net_config.n_sectors)
    if not examples:
        raise ResourceError('cannot train on an empty manifest')
    if len(examples) < MIN_RECORDS:
        logger.warning(f'Training on only {len(examples)} records')
    valid = load_examples(valid_manifest, net_config.n_sectors) if valid_manifest is not None else []

    model = DSXNet(net_config, seed)
    optimizer = Adam(model.parameters())
    rng = make_rng(seed, SHUFFLE_STREAM)
    history, best, steps = [], None, 0
    logger.info(f'Training {model.parameter_count()} parameters on {len(examples)} records, seed {seed}')

    for epoch in range(train_config.epochs):
        lr = learning_rate(epoch, train_config)
        order = rng.permutation(len(examples))
        losses = []
        for start in range(0, len(order), train_config.batch_size):
            batch = order[start:start + train_config.batch_size]
            optimizer.zero_grad()
            for index in batch:
                example = examples[int(index)]
                mixture, target = augment(rng, example.mixture, example.target, train_config)
                loss = example_loss(model, stats, mixture, target, example, train_config.silent_weight)
                backward(loss * (1.0 / len(batch)))
                losses.append(loss.item())
            optimizer.step(lr)
            steps += 1
            if train_config.max_steps is not None and steps >= train_config.max_steps:
                break

        entry = {'epoch': epoch, 'lr': lr, 'train_loss': float(np.mean(losses))}
        if valid:
            entry['valid_loss'] = mean_loss(model, stats, valid, train_config.silent_weight)
            if best is None or entry['valid_loss'] < best['valid_loss']:
                best = {'epoch': epoch, 'valid_loss': entry['valid_loss'], 'params': model.parameter_arrays()}
        history.append(entry)
        logger.info(f"Epoch {epoch}: lr {lr:.2e}, train {entry['train_loss']:.3f}"
                    + (f", valid {entry['valid_loss']:.3f}" if valid else ''))
        if train_config.max_steps is not None and steps >= train_config.max_steps:
            break

    if best is not None:
        model.load_parameters(best['params'])
    metadata = {
        'seed': int(seed),
        'prng_algorithm': PRNG_ALGORITHM,
        'epochs': len(history),
        'steps': steps,
        'records': len(examples),
        'history': history,
        'final_train_loss': history[-1]['train_loss'],
        'final_valid_loss': history[-1].get('valid_loss'),
        'best_epoch': best['epoch'] if best is not None else history[-1]['epoch'],
        'train_config': attrs.asdict(train_config),
    }
    return Checkpoint.from_model(model, stats, metadata)
