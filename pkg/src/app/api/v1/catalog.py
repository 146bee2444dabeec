"""
Soliton catalog API endpoints
"""
from typing import List

from fastapi import APIRouter, Depends, Query

from app.api.v1.errors import http_error
from app.core.dependencies import get_workbench_service
from app.core.exceptions import Curv4Error
from app.core.numeric import Precision
from app.schemas.run import ModelInfo, VerifyResponse
from app.services.workbench_service import WorkbenchService

router = APIRouter()


@router.get("", response_model=List[ModelInfo])
async def list_models(service: WorkbenchService = Depends(get_workbench_service)):
    """List the model solitons with their normalization data"""
    return service.list_models()


@router.get("/{name}/verify", response_model=VerifyResponse)
async def verify_model(
    name: str,
    precision: Precision = Query(Precision.FLOATING, description="rational or floating"),
    points: int = Query(100, ge=1, le=10_000, description="Sample points"),
    seed: int = Query(0, description="Sample point seed"),
    service: WorkbenchService = Depends(get_workbench_service),
):
    """Run the soliton identity suite on one model"""
    try:
        reports = service.verify_model(name, precision, points, seed)
    except Curv4Error as e:
        raise http_error(e)
    return VerifyResponse(
        model=name,
        precision=precision,
        passed=all(report.passed for report in reports),
        reports=reports,
    )
