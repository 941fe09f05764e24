"""
Output files: CSV tables, JSON documents and the run manifest.

All files are written through a temporary file and renamed into place, so a
crashed run never leaves a half-written artifact behind.
"""

import csv
import hashlib
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from config import CLI_CONFIG, __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def format_value(value: Any) -> str:
    """CSV cell text: '.' decimals, 17 significant digits, no locale."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{CLI_CONFIG['csv_digits']}g}"
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, complex):
        return {'re': to_jsonable(value.real), 'im': to_jsonable(value.imag)}
    if isinstance(value, Path):
        return str(value)
    return value


def atomic_write_bytes(path: Union[str, Path], data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_bytes(rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> bytes:
    if columns is None:
        columns = list(rows[0]) if rows else []
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buffer.getvalue().encode('utf-8')


def json_bytes(data: Any) -> bytes:
    return (json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + '\n').encode('utf-8')


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """
    Provenance record written after a successful run: config echo, code
    version, timestamps and a checksum for every output file.
    """

    command: str
    config: Dict[str, Any]
    output_dir: str
    started_at: str
    finished_at: str
    code_version: str = __version__
    outputs: List[Dict[str, Any]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        return cls(**data)

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'RunManifest':
        return cls.from_dict(json.loads(Path(path).read_text()))


class ArtifactWriter:
    """
    Collects the files of one run inside an output directory and finishes
    with the manifest.
    """

    def __init__(self, output_dir: Union[str, Path], formats: Iterable[str] = ('csv', 'json')):
        self.output_dir = Path(output_dir)
        self.formats = set(formats)
        self.outputs: List[Dict[str, Any]] = []

    def _record(self, path: Path):
        self.outputs.append({
            'filename': path.name,
            'sha256': sha256_file(path),
            'size_bytes': path.stat().st_size,
        })
        logger.info(f"Wrote {path}")

    def write_bytes(self, name: str, data: bytes) -> Path:
        path = atomic_write_bytes(self.output_dir / name, data)
        self._record(path)
        return path

    def table(self, stem: str, rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None,
              document: Optional[Dict[str, Any]] = None) -> List[Path]:
        """Write `stem`.csv from rows and `stem`.json from document (or the rows)."""
        written = []
        if 'csv' in self.formats:
            written.append(self.write_bytes(f'{stem}.csv', csv_bytes(rows, columns)))
        if 'json' in self.formats:
            payload = document if document is not None else {'rows': list(rows)}
            written.append(self.write_bytes(f'{stem}.json', json_bytes(payload)))
        return written

    def finish(self, command: str, config: Dict[str, Any], started_at: str,
               warnings: Optional[List[str]] = None) -> RunManifest:
        manifest = RunManifest(
            command=command,
            config=to_jsonable(config),
            output_dir=str(self.output_dir),
            started_at=started_at,
            finished_at=utc_now(),
            outputs=list(self.outputs),
            warnings=list(warnings or []),
        )
        atomic_write_bytes(self.output_dir / MANIFEST_NAME, json_bytes(manifest.to_dict()))
        return manifest
