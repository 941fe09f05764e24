import pytest
from hypothesis import settings

from ansatz_gs import ChainParams
from config import CLI_CONFIG, DATABASE_CONFIG

settings.register_profile('isb', deadline=None, max_examples=200)
settings.load_profile('isb')


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """Keep user environment variables from leaking into runs."""
    monkeypatch.delenv(CLI_CONFIG['output_dir_env'], raising=False)
    monkeypatch.delenv(DATABASE_CONFIG['url_env'], raising=False)


@pytest.fixture
def ordered_chain():
    """LF-ordered point used throughout: lambda ~ 0.16454."""
    return ChainParams(omega0=1.0, omega=1.0, g=0.6)


@pytest.fixture
def output_dir(tmp_path):
    return tmp_path / 'out'
