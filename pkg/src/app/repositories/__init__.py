"""
Repository factories
"""
from functools import lru_cache

from app.repositories.model_repository import InMemoryModelRepository, ModelRepository


@lru_cache
def get_model_repository() -> ModelRepository:
    """Return singleton model catalog"""
    return InMemoryModelRepository()


__all__ = [
    "ModelRepository",
    "InMemoryModelRepository",
    "get_model_repository",
]
