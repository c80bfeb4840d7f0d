"""
Base class for the lab's management commands.

Every command takes one JSON config path plus the overriding flags
``--seed``, ``--out`` and ``--n-sectors``. The config is validated with the
command's DRF serializer; a failed validation exits with code 2 and names
the dotted field path. Each run writes ``run_metadata.json`` into its output
directory and is recorded as an ExperimentRun.
"""
import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from apps.common.exceptions import LabError
from apps.common.files import sha256_of, write_json
from apps.common.random import PRNG_ALGORITHM

logger = logging.getLogger(__name__)

METADATA_FILE = 'run_metadata.json'
USAGE_ERROR = 2


class LabConfigSerializer(serializers.Serializer):
    """Fields shared by every command config."""

    seed = serializers.IntegerField(default=0, min_value=0, max_value=2 ** 63 - 1)


def flatten_errors(errors, prefix=''):
    """
    Turn nested DRF errors into (dotted.path, message) pairs.

    Handles field dicts, lists of per-item dicts (``many=True``) and the
    index-keyed dicts produced by ``ListField``.
    """
    if isinstance(errors, dict):
        for key, value in errors.items():
            yield from flatten_errors(value, f'{prefix}.{key}' if prefix else str(key))
    elif isinstance(errors, list):
        if all(isinstance(e, str) for e in errors):
            yield prefix or 'config', ' '.join(errors)
        else:
            for index, value in enumerate(errors):
                if value:
                    yield from flatten_errors(value, f'{prefix}.{index}' if prefix else str(index))
    else:
        yield prefix or 'config', str(errors)


def run_metadata(command, document):
    return {
        'command': command,
        'config_sha256': sha256_of(document),
        'seed': document.get('seed', 0),
        'prng_algorithm': PRNG_ALGORITHM,
        'artifact_version': settings.SIEVE_LAB['ARTIFACT_VERSION'],
        'config': document,
    }


class ExperimentCommand(BaseCommand):
    """
    Subclasses set ``config_serializer`` and implement ``run``.

    ``run(config, out_dir, run)`` returns a JSON-serializable summary that is
    stored on the ExperimentRun.
    """

    config_serializer = LabConfigSerializer
    command_name = None

    def add_arguments(self, parser):
        parser.add_argument('config', help='Path of the JSON config document')
        parser.add_argument('--seed', type=int, default=None, help='Override the config seed')
        parser.add_argument('--out', default=None, help='Output directory')
        parser.add_argument('--n-sectors', type=int, choices=[6, 9], default=None,
                            help='Override the sector count')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def get_command_name(self):
        return self.command_name or self.__module__.rsplit('.', 1)[-1]

    def load_document(self, path):
        try:
            document = json.loads(Path(path).read_text(encoding='utf-8'))
        except OSError as exc:
            raise CommandError(f'config: cannot read {path}: {exc}', returncode=USAGE_ERROR) from exc
        except json.JSONDecodeError as exc:
            raise CommandError(f'config: invalid JSON in {path}: {exc}', returncode=USAGE_ERROR) from exc
        if not isinstance(document, dict):
            raise CommandError('config: document must be a JSON object', returncode=USAGE_ERROR)
        return document

    def apply_overrides(self, document, options):
        document = dict(document)
        if options.get('seed') is not None:
            document['seed'] = options['seed']
        if options.get('n_sectors') is not None:
            if 'n_sectors' not in self.config_serializer().fields:
                raise CommandError(
                    f'--n-sectors: not a parameter of {self.get_command_name()}',
                    returncode=USAGE_ERROR,
                )
            document['n_sectors'] = options['n_sectors']
        return document

    def validate(self, document):
        serializer = self.config_serializer(data=document)
        if not serializer.is_valid():
            message = '; '.join(f'{path}: {text}' for path, text in flatten_errors(serializer.errors))
            raise CommandError(f'invalid config: {message}', returncode=USAGE_ERROR)
        return serializer.validated_data

    def output_dir(self, options, metadata):
        if options.get('out'):
            return Path(options['out'])
        root = Path(settings.SIEVE_LAB['OUTPUT_ROOT'])
        return root / self.get_command_name() / metadata['config_sha256'][:12]

    def handle(self, *args, **options):
        from apps.experiments.models import ExperimentRun

        command = self.get_command_name()
        document = self.apply_overrides(self.load_document(options['config']), options)
        config = self.validate(document)
        metadata = run_metadata(command, document)
        out_dir = self.output_dir(options, metadata)
        write_json(out_dir / METADATA_FILE, metadata)

        run = ExperimentRun.objects.create(
            command=command,
            config=document,
            config_sha256=metadata['config_sha256'],
            seed=metadata['seed'],
            prng_algorithm=metadata['prng_algorithm'],
            artifact_version=metadata['artifact_version'],
            output_dir=str(out_dir),
        )
        self.stdout.write(self.style.MIGRATE_HEADING(f'{command}: run {run.pk} -> {out_dir}'))
        logger.info(f"Run {run.pk} ({command}) started, config {metadata['config_sha256'][:12]}")

        try:
            summary = self.run(config, out_dir, run)
        except LabError as exc:
            logger.error(f"Run {run.pk} ({command}) failed: {exc}", exc_info=True)
            run.mark_failed(str(exc))
            raise CommandError(f'{command}: {exc}') from exc
        except Exception as exc:
            run.mark_failed(str(exc))
            raise

        run.mark_completed(summary or {})
        logger.info(f"Run {run.pk} ({command}) completed")
        self.stdout.write(self.style.SUCCESS(f'✓ {command} completed'))
        return None

    def run(self, config, out_dir, run):
        raise NotImplementedError
