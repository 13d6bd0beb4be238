import os

import pytest
from fastapi.testclient import TestClient

from scorer_service.app import create_app
from scorer_service.registry import ModelRegistry
from scorer_service.toymodels import build_checkpoints

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory):
    """Toy checkpoints trained once per session.  Point SCORER_TOY_DIR
    at an existing build to skip the ~20s of training."""
    prebuilt = os.environ.get("SCORER_TOY_DIR")
    if prebuilt:
        return prebuilt
    out = tmp_path_factory.mktemp("toy_models")
    build_checkpoints(out, samples=1500, seed=0)
    return str(out)


@pytest.fixture(scope="session")
def registry(checkpoints):
    return ModelRegistry(
        cls_path=f"{checkpoints}/causal",
        lm_path=f"{checkpoints}/causal",
        enc_path=f"{checkpoints}/encoder",
    )


@pytest.fixture(scope="session")
def client(registry):
    with TestClient(create_app(registry)) as test_client:
        yield test_client
