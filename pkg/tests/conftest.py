import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

SEED = int(os.environ.get("JACQUETLAB_SEED", "20240611"))

settings.register_profile("jacquetlab", derandomize=False, deadline=None, max_examples=60,
                          print_blob=True)
settings.load_profile("jacquetlab")


@pytest.fixture(autouse=True)
def _fresh_state(monkeypatch):
    """Each test starts from the default window policy and convention cache."""
    from jacquetlab import jacquet, vfilt
    jacquet.set_start_window(None)
    monkeypatch.delenv("JACQUETLAB_MAX_WINDOW", raising=False)
    yield
    jacquet.set_start_window(None)
    if vfilt.TWIST != 1:  # pragma: no cover
        vfilt.TWIST = 1
    vfilt._PINNED.pop(-1, None)
