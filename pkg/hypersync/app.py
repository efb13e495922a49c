"""FastAPI application exposing single runs, state classification and the self-checks."""
import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from hypersync import __version__
from hypersync.exceptions import (
    ConfigError,
    DimensionError,
    HypergraphError,
    HypersyncError,
    ParameterError,
    ResonanceError,
)
from hypersync.experiments import classify_state, pinned_order, run_once
from hypersync.hypergraph import all_to_all, random_simplicial_complex
from hypersync.models import (
    ClassifyRequest,
    ControlSpec,
    InitialCondition,
    IntegrationPlan,
    ModelParams,
    SimulateRequest,
    SimulateResponse,
    StateLabel,
    ValidateRequest,
    ValidationReport,
)
from hypersync.settings import settings
from hypersync.utils import get_logger
from hypersync.validation import run_validation

logger = get_logger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title=settings.API_TITLE,
    version=settings.API_VERSION,
    description="Simulation and control of higher-order Kuramoto oscillators on hypergraphs"
)

# Add CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

INPUT_ERRORS = (ConfigError, DimensionError, HypergraphError, ParameterError)


def _status_for(error: HypersyncError) -> int:
    if isinstance(error, INPUT_ERRORS):
        return 400
    if isinstance(error, ResonanceError):
        return 422
    return 500


@app.get("/")
async def root():
    """Root endpoint."""
    return {
        "message": "Hypersync API",
        "version": settings.API_VERSION,
        "endpoints": {
            "simulate": "/simulate",
            "classify": "/classify",
            "validate": "/validate",
            "health": "/health"
        }
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "version": __version__,
        "resonance_tol": settings.RESONANCE_TOL
    }


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest):
    """
    Run one simulation with drawn frequencies and near-synchronized initial phases.

    Args:
        request: SimulateRequest with topology, couplings, control mode and horizon

    Returns:
        SimulateResponse with R-hat, final R, mean control intensity, cost and state label
    """
    try:
        logger.info(f"Simulating n={request.n} {request.topology} K1={request.k1} K2={request.k2} mode={request.mode}")
        if request.topology == "all_to_all":
            h = all_to_all(request.n)
        else:
            h = random_simplicial_complex(request.n, request.k1_deg, request.k2_deg, request.seed)

        if request.mode == "none":
            spec = ControlSpec()
        elif request.m is None or request.m >= h.n:
            spec = ControlSpec.all_nodes(h.n, request.mode)
        else:
            order = pinned_order(h.n, request.seed)
            spec = ControlSpec(mode=request.mode, pinned=tuple(int(v) for v in order[:request.m]))

        plan = IntegrationPlan(t_end=request.t_end, dt=request.dt)
        params = ModelParams(k1=request.k1, k2=request.k2, omega=np.zeros(h.n))
        ic = InitialCondition(theta_high=request.theta_high)
        window = (0.75 * request.t_end, request.t_end)
        record = run_once(h, params, spec, ic, plan, request.seed, window)

        intensities = [v for _, v in record.intensity_series]
        return SimulateResponse(
            status="success",
            r_hat=record.r_hat,
            final_r=record.r_series[-1][1],
            mean_intensity=float(np.mean(intensities)),
            cost=record.cost,
            classification=record.classification,
            samples=len(record.r_series),
        )

    except HypersyncError as e:
        logger.error(f"Error simulating: {e}")
        raise HTTPException(status_code=_status_for(e), detail=str(e))
    except Exception as e:
        logger.error(f"Error simulating: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@app.post("/classify", response_model=StateLabel)
async def classify(request: ClassifyRequest):
    """Classify a phase vector as synchronized, two-cluster or incoherent."""
    return classify_state(np.asarray(request.phases, dtype=float))


@app.post("/validate", response_model=ValidationReport)
def validate(request: ValidateRequest):
    """Run the numerical self-checks."""
    try:
        return run_validation(flip_sign=request.flip_sign)
    except HypersyncError as e:
        logger.error(f"Error validating: {e}")
        raise HTTPException(status_code=_status_for(e), detail=str(e))


if __name__ == "__main__":
    import uvicorn

    logger.info(f"Starting server on {settings.API_HOST}:{settings.API_PORT}")
    uvicorn.run(
        "hypersync.app:app",
        host=settings.API_HOST,
        port=settings.API_PORT,
        reload=True
    )
