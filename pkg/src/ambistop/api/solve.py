from typing import Any, Dict, List, Literal, Optional

from fastapi import APIRouter, Depends, HTTPException
from pydantic import Field, ValidationError

from ..config.settings import get_settings
from ..models.problem import ProblemSpec
from ..services.solver_service import SolverService
from ..utils.errors import AmbistopError

router = APIRouter(prefix=f"{get_settings().api_prefix}/problems", tags=["problems"])

REQUEST_FIELDS = {"mc", "pde", "paths", "grid", "seed", "param", "values"}


class VerifyRequest(ProblemSpec):
    mc: bool = False
    pde: bool = False
    paths: Optional[int] = Field(default=None, ge=100)
    grid: Optional[int] = Field(default=None, ge=101)
    seed: Optional[int] = Field(default=None, ge=0)


class SweepRequest(ProblemSpec):
    param: Literal["kappa", "r", "K", "a_norm"]
    values: List[float] = Field(min_length=1)


def get_service() -> SolverService:
    return SolverService(get_settings())


def _spec(request: ProblemSpec) -> ProblemSpec:
    return ProblemSpec.model_validate(request.model_dump(exclude=REQUEST_FIELDS))


def _run(call) -> Dict[str, Any]:
    try:
        return call().model_dump(mode="json", by_alias=True)
    except AmbistopError as e:
        raise HTTPException(status_code=400, detail=e.to_dict())
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=e.errors(include_url=False, include_context=False))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/solve")
def solve_problem(spec: ProblemSpec, service: SolverService = Depends(get_service)):
    """Solve a problem spec; same report as ``ambistop solve``"""
    return _run(lambda: service.solve(spec)[0])


@router.post("/verify")
def verify_problem(request: VerifyRequest, service: SolverService = Depends(get_service)):
    """Cross-check the analytic solution with the requested engines"""
    return _run(lambda: service.verify(
        _spec(request), mc=request.mc, pde=request.pde,
        paths=request.paths, grid=request.grid, seed=request.seed,
    ))


@router.post("/sweep")
def sweep_problem(request: SweepRequest, service: SolverService = Depends(get_service)):
    return _run(lambda: service.sweep(_spec(request), request.param, request.values)[0])
