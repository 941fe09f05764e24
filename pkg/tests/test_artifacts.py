import json

import numpy as np
import pytest

from artifacts import (ArtifactWriter, RunManifest, atomic_write_bytes, csv_bytes, format_value,
                       json_bytes, sha256_file, to_jsonable)


@pytest.mark.parametrize("value,text", [
    (0.1, '0.10000000000000001'),
    (-2.0, '-2'),
    (np.float64(0.25), '0.25'),
    (np.int64(3), '3'),
    (True, 'true'),
    (np.bool_(False), 'false'),
    (None, ''),
    ('+', '+'),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_to_jsonable():
    data = to_jsonable({'a': (1.0, float('inf')), 'b': np.array([np.nan]), 'c': 1 + 2j, 1: np.int32(4)})
    assert data == {'a': [1.0, 'inf'], 'b': ['nan'], 'c': {'re': 1.0, 'im': 2.0}, '1': 4}
    json.dumps(data, allow_nan=False)


def test_csv_layout():
    text = csv_bytes([{'x': 0.5, 'y': None}, {'x': 1, 'y': 'a,b'}], columns=['x', 'y']).decode()
    assert text == 'x,y\n0.5,\n1,"a,b"\n'


def test_json_is_sorted_and_finite():
    text = json_bytes({'b': 1, 'a': float('-inf')}).decode()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)['a'] == '-inf'


def test_atomic_write_leaves_only_the_target(tmp_path):
    path = atomic_write_bytes(tmp_path / 'sub' / 'file.bin', b'payload')
    assert path.read_bytes() == b'payload'
    assert [p.name for p in path.parent.iterdir()] == ['file.bin']


def test_writer_manifest(tmp_path):
    writer = ArtifactWriter(tmp_path, formats=('csv',))
    (written,) = writer.table('bands', [{'qd': 0.0, 'e': 1.5}])
    assert written.name == 'bands.csv'
    manifest = writer.finish('bands', {'command': 'bands'}, started_at='2026-01-01T00:00:00+00:00',
                             warnings=['coarse grid'])
    (entry,) = manifest.outputs
    assert entry['sha256'] == sha256_file(written)
    assert entry['size_bytes'] == written.stat().st_size

    loaded = RunManifest.load(tmp_path / 'manifest.json')
    assert loaded == manifest
    assert loaded.warnings == ['coarse grid']
