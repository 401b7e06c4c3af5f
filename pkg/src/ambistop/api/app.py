"""
HTTP surface for ambistop: stateless solve, verify and sweep endpoints
"""

import uvicorn
from fastapi import FastAPI

from .. import __version__
from ..config.settings import configure_logging
from .solve import router as problems_router

app = FastAPI(title="ambistop", version=__version__)
app.include_router(problems_router)


@app.on_event("startup")
async def startup_event():
    configure_logging()


@app.get("/health")
async def health_check():
    return {"status": "healthy", "version": __version__}


if __name__ == "__main__":
    uvicorn.run(app, host="0.0.0.0", port=8000)
