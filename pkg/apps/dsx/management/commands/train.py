"""
Train an extraction network.

Writes ``model.ssdx`` and ``training_history.csv`` (epoch, lr, train_loss,
valid_loss) into the output directory.

Usage:
    python manage.py train configs/train.json --out runs/train --seed 3
"""
from apps.common.commands import ExperimentCommand
from apps.common.files import write_csv
from apps.dsx.checkpoint import save_checkpoint
from apps.dsx.serializers import TrainCommandSerializer
from apps.dsx.training import train


class Command(ExperimentCommand):
    help = 'Train the directional speech extraction network on a mixture manifest'
    config_serializer = TrainCommandSerializer

    def run(self, config, out_dir, run):
        net_config = config['net_config']
        self.stdout.write(
            f"  {len(config['manifest'])} records, {net_config.n_sectors} sectors, "
            f"{config['train_config'].epochs} epochs"
        )
        checkpoint = train(
            config['manifest'], config['norm_stats']['stats'], net_config, config['train_config'],
            config['seed'], valid_manifest=config.get('valid_manifest'),
        )
        path = save_checkpoint(checkpoint, out_dir / 'model.ssdx')
        history = checkpoint.metadata['history']
        write_csv(out_dir / 'training_history.csv', ['epoch', 'lr', 'train_loss', 'valid_loss'], (
            [e['epoch'], e['lr'], e['train_loss'], e.get('valid_loss', '')] for e in history
        ))
        self.stdout.write(f"  • final training loss {checkpoint.metadata['final_train_loss']:.3f} dB")
        return {
            'checkpoint': path.name,
            'epochs': checkpoint.metadata['epochs'],
            'steps': checkpoint.metadata['steps'],
            'final_train_loss': checkpoint.metadata['final_train_loss'],
            'final_valid_loss': checkpoint.metadata['final_valid_loss'],
        }
