"""
FastAPI dependencies
"""
from fastapi import Depends

from app.repositories import ModelRepository, get_model_repository
from app.services.workbench_service import WorkbenchService


def get_model_repository_dependency() -> ModelRepository:
    """FastAPI dependency for the model catalog"""
    return get_model_repository()


def get_workbench_service(
    repository: ModelRepository = Depends(get_model_repository_dependency),
) -> WorkbenchService:
    """Dependency to get the workbench service"""
    return WorkbenchService(repository)
