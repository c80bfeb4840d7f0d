"""
Small on-disk datasets for tests of the apps that consume manifests.
"""
from pathlib import Path

from apps.microstructure.response import realize_bank, uniform_grid
from apps.microstructure.specs import default_spec, flat_spec
from apps.scenes.corpus import load_corpus, synthesize_corpus
from apps.scenes.mixtures import MixtureConfig, generate_mixtures
from apps.scenes.rooms import RigTemplate, RoomSpec

TEST_ROOMS = (
    RoomSpec(dims=(5.0, 4.0, 3.0), absorption=0.5, max_order=1, room_id='a'),
    RoomSpec(dims=(6.0, 5.0, 3.0), absorption=0.4, max_order=1, room_id='b'),
)


def small_dataset(out_dir, name='mixtures', seed=0, n_sectors=6, max_targets=1, with_array=True,
                  clip_seconds=1.5, no_target_rate=0.1, flat=False):
    """
    Synthesize a corpus and write a short manifest under ``out_dir``.

    With ``flat`` the microstructure mic uses the flat bank; the scenes and
    the reference channel stay those of the same seed.

    Returns:
        Path: the manifest path
    """
    out_dir = Path(out_dir)
    corpus = load_corpus(synthesize_corpus(out_dir / 'corpus', n_clips=4, seed=seed, seconds=3.0),
                         min_seconds=clip_seconds)
    bank = realize_bank(flat_spec() if flat else default_spec(), uniform_grid(10.0), 64)
    config = MixtureConfig(
        n_sectors=n_sectors,
        max_targets=max_targets,
        clip_seconds=clip_seconds,
        noise_head_seconds=0.25,
        interferer_range=(1, 1),
        no_target_rate=no_target_rate,
        with_array=with_array,
    )
    generate_mixtures(corpus, list(TEST_ROOMS), [RigTemplate()], config, seed, bank, out_dir, name=name)
    return out_dir / f'{name}.jsonl'
