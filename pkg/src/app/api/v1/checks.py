"""
Pinching check API endpoints
"""
from fastapi import APIRouter, Depends

from app.api.v1.errors import http_error
from app.core.dependencies import get_workbench_service
from app.core.exceptions import Curv4Error
from app.schemas.reports import FuzzSummary
from app.schemas.run import ClassifyRequest, ClassifyResponse, FuzzRequest
from app.services.workbench_service import WorkbenchService

router = APIRouter()


@router.post("/classify", response_model=ClassifyResponse)
async def classify(
    request: ClassifyRequest,
    service: WorkbenchService = Depends(get_workbench_service),
):
    """Evaluate the pinching conditions on a catalog model"""
    try:
        reports = service.classify_model(request.model, request.gamma, request.duality, request.precision)
    except Curv4Error as e:
        raise http_error(e)
    return ClassifyResponse(model=request.model, reports=reports)


@router.post("/fuzz", response_model=FuzzSummary)
def fuzz(
    request: FuzzRequest,
    service: WorkbenchService = Depends(get_workbench_service),
):
    """Randomized sweep of the algebraic inequalities"""
    try:
        return service.fuzz(request.trials, request.seed)
    except Curv4Error as e:
        raise http_error(e)
