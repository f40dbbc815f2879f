"""HTTP service exposing the reflector design toolkit.

Every endpoint is a thin wrapper over the library: requests and responses are
pydantic models, angles are degrees, lengths on the wire are millimeters
(mask files keep meters, matching the on-disk JSON contract).  Domain
validation failures map to HTTP 400.
"""

from __future__ import annotations

import io

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .. import __version__
from ..bounds import thinning_convergence, verify_gain_bound
from ..core import angle_grid, pattern_sweep, pattern_to_csv
from ..diffraction import design_period, period_design_to_mask, visible_orders
from ..errors import ValidationError
from ..fab import (
    MM,
    base_mesh,
    build_layout,
    emit_stl,
    layout_report,
    pads_mesh,
    stencil_from_layout,
    stencil_mesh,
    stripe_mask_2d,
)
from ..figures import reproduce_figure
from ..masks import Aperture, MaskDesign, SteeringTask, design_mask, select_psi, thinning_ratio
from ..measure import (
    background_subtract,
    compare,
    load_scan,
    normalize_pattern,
    normalized_to_csv,
)
from . import models

app = FastAPI(title="reflectkit", version=__version__)


@app.exception_handler(ValidationError)
async def _domain_error(request: Request, exc: ValidationError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


def _to_document(design: MaskDesign) -> models.MaskDocument:
    return models.MaskDocument(**design.to_dict())


def _from_document(doc: models.MaskDocument) -> MaskDesign:
    return MaskDesign.from_dict(doc.model_dump())


def _task_from_request(req: models.MaskDesignRequest, psi: float) -> SteeringTask:
    targets = tuple(
        (t.theta_deg, complex(t.weight_re, t.weight_im)) for t in req.targets
    )
    return SteeringTask(req.theta_i_deg, targets, psi)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/design/mask")
def post_design_mask(req: models.MaskDesignRequest) -> models.MaskDesignResponse:
    aperture = Aperture(req.m, req.d0_mm * MM, req.lambda_mm * MM)
    psi = req.psi_rad
    score_db: float | None = None
    if req.auto_psi:
        psi, score_db = select_psi(
            aperture, _task_from_request(req, 0.0), grid_size=req.psi_grid
        )
    design = design_mask(aperture, _task_from_request(req, psi))
    return models.MaskDesignResponse(
        mask=_to_document(design),
        thinning_ratio=thinning_ratio(design.coefficients),
        psi_rad=psi,
        psi_score_db=score_db,
    )


@app.post("/design/period")
def post_design_period(req: models.PeriodDesignRequest) -> models.PeriodDesignResponse:
    wavelength = req.lambda_mm * MM
    d0 = req.d0_mm * MM if req.d0_mm is not None else None
    design = design_period(
        req.theta_i_deg,
        req.theta_t_deg,
        wavelength,
        n=req.order,
        d0=d0,
        wells_per_row=req.wells_per_row,
    )
    orders = visible_orders(design.period, wavelength, req.theta_i_deg)
    snapped = None
    mask_doc = None
    if design.snapped is not None:
        snapped = models.SnappedInfo(
            stride=design.snapped.stride,
            delta_actual_mm=design.snapped.delta_actual / MM,
            m_active=design.snapped.m_active,
        )
        mask_doc = _to_document(
            period_design_to_mask(design, d0, req.wells_per_row)
        )
    return models.PeriodDesignResponse(
        delta_mm=design.period / MM,
        order=design.order,
        n_min=orders.n_min,
        n_max=orders.n_max,
        orders=[models.OrderInfo(n=n, theta_deg=t) for n, t in orders.directions],
        snapped=snapped,
        mask=mask_doc,
    )


@app.post("/simulate")
def post_simulate(req: models.SimulateRequest) -> PlainTextResponse:
    design = _from_document(req.mask)
    grid = angle_grid(req.grid.start, req.grid.stop, req.grid.step)
    pattern = pattern_sweep(
        design.aperture, design.coefficients, design.task.incidence, grid
    )
    return PlainTextResponse(pattern_to_csv(pattern), media_type="text/csv")


@app.post("/verify/bounds")
def post_verify_bounds(req: models.BoundsRequest) -> models.BoundsResponse:
    report = verify_gain_bound(req.trials, (req.m_min, req.m_max), req.seed)
    return models.BoundsResponse(**report.to_dict())


@app.post("/analysis/thinning")
def post_thinning(req: models.ThinningRequest) -> models.ThinningResponse:
    points = thinning_convergence(
        req.theta_i_deg,
        req.theta_t_deg,
        req.d0_mm * MM,
        req.lambda_mm * MM,
        req.m_values,
    )
    return models.ThinningResponse(
        points=[models.ThinningPoint(m=m, eta=eta) for m, eta in points]
    )


def _layout_for(req_mask: models.MaskDocument, rows: int):
    design = _from_document(req_mask)
    grid = stripe_mask_2d(design.coefficients, rows)
    return build_layout(grid, pitch=design.aperture.spacing)


@app.post("/export/stl")
def post_export_stl(req: models.StlRequest) -> Response:
    layout = _layout_for(req.mask, req.rows)
    if req.solid == "base":
        mesh = base_mesh(layout)
    elif req.solid == "pads":
        mesh = pads_mesh(layout)
    else:
        mesh = stencil_mesh(stencil_from_layout(layout), layout)
    buf = io.BytesIO()
    emit_stl(mesh, buf)
    return Response(
        content=buf.getvalue(),
        media_type="application/octet-stream",
        headers={"X-Triangle-Count": str(len(mesh))},
    )


@app.post("/export/report")
def post_export_report(req: models.LayoutReportRequest) -> models.LayoutReportResponse:
    layout = _layout_for(req.mask, req.rows)
    return models.LayoutReportResponse(
        report=layout_report(layout),
        on_count=layout.on_count,
        fill_fraction=layout.fill_fraction,
    )


@app.post("/measurement/compare")
def post_compare(req: models.CompareRequest) -> models.CompareResponse:
    design = _from_document(req.mask)
    meas = load_scan(req.measured_csv, incidence=design.task.incidence)
    if req.mount_csv is not None:
        mount = load_scan(req.mount_csv, incidence=design.task.incidence)
        linear = background_subtract(meas, mount)
    else:
        linear = list(
            zip(
                meas.theta_deg.tolist(),
                (10.0 ** (meas.power_dbm / 10.0)).tolist(),
            )
        )
    measured_db = normalize_pattern(linear)
    grid = angle_grid(req.grid.start, req.grid.stop, req.grid.step)
    theory = pattern_sweep(
        design.aperture, design.coefficients, design.task.incidence, grid
    )
    report = compare(
        measured_db, theory, req.targets, floor_db=req.floor_db
    )
    return models.CompareResponse(
        targets=[
            models.TargetComparisonModel(
                theta=t.theta,
                found=t.found,
                angle_err_deg=t.angle_err_deg,
                level_err_db=t.level_err_db,
            )
            for t in report.targets
        ],
        rms_db=report.rms_db,
        floor_db=report.floor_db,
        normalized_csv=normalized_to_csv(measured_db),
    )


@app.get("/figures/{figure_id}")
def get_figure(figure_id: str) -> models.FigureResponse:
    patterns = reproduce_figure(figure_id)
    return models.FigureResponse(
        figure=figure_id,
        curves={name: pattern_to_csv(p) for name, p in patterns.items()},
    )
