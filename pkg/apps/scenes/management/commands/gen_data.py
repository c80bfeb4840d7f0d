"""
Generate mixture manifests.

Writes ``train.jsonl`` (plus ``valid.jsonl`` and ``test.jsonl`` when a
validation fraction or held-out rooms are configured) and the audio they
reference under ``audio/``. With ``synthetic_clips`` a synthetic corpus is
written to ``corpus/`` first.

Usage:
    python manage.py gen_data configs/gen_data.json --out runs/data
"""
from apps.common.commands import ExperimentCommand
from apps.microstructure.serializers import bank_from_config
from apps.scenes.corpus import load_corpus, synthesize_corpus
from apps.scenes.mixtures import generate_splits, sector_combinations
from apps.scenes.rooms import RigTemplate
from apps.scenes.serializers import GenDataConfigSerializer


class Command(ExperimentCommand):
    help = 'Simulate a mixture dataset and write its manifests'
    config_serializer = GenDataConfigSerializer

    def run(self, config, out_dir, run):
        if 'corpus' in config:
            corpus = load_corpus(config['corpus'])
        else:
            corpus = load_corpus(synthesize_corpus(out_dir / 'corpus', config['synthetic_clips'], config['seed']))
        rooms = [entry['room'] for entry in config['rooms']]
        rigs = [entry['template'] for entry in config.get('rigs') or []] or [RigTemplate()]
        bank = bank_from_config(config)
        mixture_config = config['mixture_config']

        combos = sector_combinations(mixture_config.n_sectors, mixture_config.max_targets)
        self.stdout.write(
            f'  {len(combos)} sector selections x {mixture_config.clips_per_combo} clips, '
            f'microstructure {bank.spec.name}'
        )
        splits = generate_splits(
            corpus, rooms, rigs, mixture_config, config['seed'], bank, out_dir,
            test_rooms=config['test_rooms'], valid_fraction=config['valid_fraction'],
        )
        for name, records in splits.items():
            self.stdout.write(f'  • {name}: {len(records)} records')
        return {
            'manifests': {name: f'{name}.jsonl' for name in splits},
            'records': {name: len(records) for name, records in splits.items()},
            'microstructure': bank.spec.name,
        }
