"""
Main FastAPI application entry point
"""
from fastapi import FastAPI

from app.api.v1 import catalog, checks
from app.core.config import settings
from app.core.logging import configure_logging

configure_logging()

app = FastAPI(
    title=settings.PROJECT_NAME,
    version=settings.VERSION,
    description="Curvature decomposition, pinching checks and shrinking soliton catalog in dimension four",
    docs_url="/docs",
    redoc_url="/redoc",
)

# Include routers
app.include_router(catalog.router, prefix="/api/v1/catalog", tags=["catalog"])
app.include_router(checks.router, prefix="/api/v1/checks", tags=["checks"])


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "curv4 API",
        "version": settings.VERSION,
        "docs": "/docs",
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy"}
