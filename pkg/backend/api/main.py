# backend/api/main.py
"""
semicech FastAPI service
The CLI commands as POST endpoints returning RunReport JSON
"""

from typing import Any, Dict, Optional

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse

from backend.api.commands import command_runner
from backend.api.report_generator import report_generator
from backend.api.settings import configure_logging, settings
from backend.models.report import RunReport, RunStatus

configure_logging()

# Initialize FastAPI app
app = FastAPI(
    title="semicech API",
    description="Cech cohomology of semiring schemes with certified results",
    version="1.0.0",
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _respond(report: RunReport):
    """400 for input errors, 422 for failed checks, else the report itself"""
    if report.status == RunStatus.ERROR:
        raise HTTPException(status_code=400, detail=report.model_dump(mode="json"))
    if report.status == RunStatus.FAILED:
        raise HTTPException(status_code=422, detail=report.model_dump(mode="json"))
    return report.model_dump(mode="json")


@app.get("/")
async def root():
    """API root endpoint"""
    return {
        "message": "semicech API",
        "version": "1.0.0",
        "status": "operational",
    }


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "service": "semicech API"}


@app.post("/cohomology")
def cohomology(
    doc: Optional[Dict[str, Any]] = Body(default=None),
    n: Optional[int] = None,
    semiring: str = "qmax",
    samples: int = 25,
    seed: Optional[int] = None,
    bound: Optional[int] = None,
    degree: Optional[str] = None,
):
    """Cohomology of a posted complex or cover document, or of O on P^n when only n is given"""
    return _respond(command_runner.cohomology(doc, n, semiring, samples, seed, bound, degree))


@app.post("/picard")
def picard(
    cocycle: Optional[Dict[str, Any]] = Body(default=None),
    n: Optional[int] = None,
    semiring: str = "qmax",
    seed: Optional[int] = None,
):
    return _respond(command_runner.picard(n, semiring, cocycle, seed))


@app.post("/affine/{verb}")
def affine(verb: str, doc: Dict[str, Any] = Body(...), seed: Optional[int] = None, bound: Optional[int] = None):
    return _respond(command_runner.affine(verb, doc, seed, bound))


@app.post("/tensor/{verb}")
def tensor(verb: str, doc: Dict[str, Any] = Body(...), bound: Optional[int] = None):
    return _respond(command_runner.tensor(verb, doc, bound))


@app.post("/check/complex")
def check_complex(doc: Dict[str, Any] = Body(...), samples: Optional[int] = None):
    return _respond(command_runner.check_complex(doc, samples))


@app.post("/render", response_class=HTMLResponse)
def render(report: RunReport):
    """Render a stored RunReport as HTML"""
    return report_generator.render(report, "html")


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "backend.api.main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=True,
    )
