"""
Domain error to HTTP status mapping
"""
from fastapi import HTTPException

from app.core.exceptions import Curv4Error, UnknownModel


def http_error(exc: Curv4Error) -> HTTPException:
    status_code = 404 if isinstance(exc, UnknownModel) else 422
    return HTTPException(status_code=status_code, detail={"code": exc.code, "message": exc.message})
