import os
from fractions import Fraction

import pytest


def pytest_configure(config):
    """Configure pytest - runs before test collection."""
    # Settings() is instantiated at import time, so the environment has to be
    # in place before any app module is imported
    os.environ.setdefault("CURV4_THREADS", "1")
    os.environ.setdefault("CURV4_LOG_LEVEL", "WARNING")
    os.environ.setdefault("CURV4_FUZZ_CHUNK", "1000")


@pytest.fixture(scope="session")
def repository():
    """Closed-form model catalog."""
    from app.repositories import get_model_repository

    return get_model_repository()


@pytest.fixture
def catalog_service(repository):
    from app.services.soliton_service import SolitonCatalogService

    return SolitonCatalogService(repository)


@pytest.fixture
def s2xr2_tensor():
    """Exact frame curvature of S^2(sqrt 2) x R^2 (sectional curvature 1/2 on e1, e2)."""
    from app.core.numeric import Precision
    from app.models.tensors import AlgCurvTensor
    from app.repositories.model_repository import space_form_curvature

    return AlgCurvTensor(space_form_curvature(Fraction(1, 2), range(2), Precision.RATIONAL))


@pytest.fixture
def s3xr_tensor():
    """Exact frame curvature of S^3(2) x R."""
    from app.core.numeric import Precision
    from app.models.tensors import AlgCurvTensor
    from app.repositories.model_repository import space_form_curvature

    return AlgCurvTensor(space_form_curvature(Fraction(1, 4), range(3), Precision.RATIONAL))
