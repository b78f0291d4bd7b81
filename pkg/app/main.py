from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from sqlalchemy import text
from sqlalchemy.exc import SQLAlchemyError
from app import __version__
from app.core.config import settings
from app.core.exceptions import RankDistillError
from app.models.database import SessionLocal, init_db
from app.routers import evaluation
from app.schemas.evaluation import ErrorResponse, HealthCheckResponse
import logging

# Configure logging
logging.basicConfig(level=settings.log_level)
logger = logging.getLogger(__name__)

# Create database tables
try:
    init_db()
    logger.info("Sweep record tables created successfully")
except Exception as e:
    logger.error(f"Failed to create sweep record tables: {e}")

app = FastAPI(
    title="Rank Distill Kit",
    description="""
    Serviço de avaliação do toolkit de destilação de rankers:

    - **Métricas** NDCG@k e MRR@k com política de consultas vazias explícita
    - **Formato TREC** para runs e qrels
    - **Estatísticas** das pontuações do professor
    - **Sweeps** armazenados, com seleção por NDCG@5 de validação
    """,
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    license_info={
        "name": "MIT",
    },
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)


# Global exception handlers
@app.exception_handler(HTTPException)
async def http_exception_handler(request, exc):
    """Handle HTTP exceptions."""
    return JSONResponse(
        status_code=exc.status_code,
        content=ErrorResponse(error=exc.detail, status_code=exc.status_code).model_dump()
    )


@app.exception_handler(RankDistillError)
async def rank_distill_exception_handler(request, exc):
    """Handle invalid inputs detected by the toolkit."""
    logger.warning(f"Rejected request: {exc}")
    return JSONResponse(
        status_code=422,
        content=ErrorResponse(
            error=type(exc).__name__,
            detail=str(exc),
            status_code=422
        ).model_dump()
    )


@app.exception_handler(SQLAlchemyError)
async def sqlalchemy_exception_handler(request, exc):
    """Handle record store errors."""
    logger.error(f"Database error: {exc}")
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(
            error="Database error occurred",
            detail="Please try again later",
            status_code=500
        ).model_dump()
    )


@app.exception_handler(Exception)
async def general_exception_handler(request, exc):
    """Handle general exceptions."""
    logger.error(f"Unexpected error: {exc}")
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(
            error="Internal server error",
            detail="An unexpected error occurred",
            status_code=500
        ).model_dump()
    )


app.include_router(evaluation.router)


@app.get("/")
async def root():
    """Root endpoint with service information."""
    return {
        "message": "Rank Distill Kit",
        "version": __version__,
        "description": "Avaliação de rankers e destilação de rankings",
        "endpoints": {
            "docs": "/docs",
            "health": "/health",
            "evaluate": "/evaluate",
            "stats": "/stats",
            "sweeps": "/sweeps/{sweep_id}",
        }
    }


@app.get("/health", response_model=HealthCheckResponse)
async def health_check():
    """Health check endpoint."""
    try:
        db = SessionLocal()
        db.execute(text("SELECT 1"))
        db.close()
        database_connected = True
    except Exception as e:
        logger.error(f"Record store health check failed: {e}")
        database_connected = False

    return HealthCheckResponse(
        status="healthy" if database_connected else "unhealthy",
        version=__version__,
        database_connected=database_connected
    )


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
