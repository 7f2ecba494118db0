import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tttbudget.config import default_config_path, load_config


@pytest.fixture(scope="session")
def default_config():
    return load_config(default_config_path())
