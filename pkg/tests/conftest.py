import os
import sys

import pytest
from hypothesis import settings

from sardkit.cli import BUNDLED, load_model

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def models():
    return {name: load_model(name) for name in BUNDLED}


@pytest.fixture(scope="session")
def frames(models):
    return {name: spec.frame() for name, spec in models.items()}
