"""
Canonical JSON, JSON-lines and CSV writers.

Outputs are byte-stable for identical inputs: keys sorted, fixed separators,
floats written with ``repr`` precision, trailing newline.
"""
import csv
import hashlib
import json
from pathlib import Path


def canonical_json(document):
    """Serialize ``document`` to the canonical JSON text used for hashing."""
    return json.dumps(document, sort_keys=True, separators=(',', ':'), ensure_ascii=True)


def sha256_of(document):
    """Return the hex SHA-256 of a document's canonical JSON form."""
    return hashlib.sha256(canonical_json(document).encode('utf-8')).hexdigest()


def write_json(path, document):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding='utf-8'))


def write_jsonl(path, records):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='\n') as fh:
        for record in records:
            fh.write(canonical_json(record) + '\n')
    return path


def read_jsonl(path):
    records = []
    with Path(path).open('r', encoding='utf-8') as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return path
