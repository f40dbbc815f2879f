"""Pydantic request/response models for the reflector design service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..masks import MASK_FILE_VERSION


class TargetSpec(BaseModel):
    theta_deg: float = Field(ge=-90, le=90)
    weight_re: float = 1.0
    weight_im: float = 0.0


class MaskDocument(BaseModel):
    """Wire form of the shared mask file (the JSON contract between
    synthesis, simulation and fabrication)."""

    version: int = MASK_FILE_VERSION
    M: int = Field(ge=1)
    d0_m: float = Field(gt=0)
    lambda_m: float = Field(gt=0)
    theta_i_deg: float = Field(ge=-90, le=90)
    targets: list[TargetSpec]
    psi_rad: float = 0.0
    bits: str


class MaskDesignRequest(BaseModel):
    theta_i_deg: float = Field(ge=-90, le=90)
    targets: list[TargetSpec] = Field(min_length=1)
    m: int = Field(default=35, ge=1)
    d0_mm: float = Field(default=2.5, gt=0)
    lambda_mm: float = Field(default=5.0, gt=0)
    psi_rad: float = 0.0
    auto_psi: bool = False
    psi_grid: int = Field(default=64, ge=1)


class MaskDesignResponse(BaseModel):
    mask: MaskDocument
    thinning_ratio: float
    psi_rad: float
    psi_score_db: float | None = None


class SnappedInfo(BaseModel):
    stride: int
    delta_actual_mm: float
    m_active: int


class OrderInfo(BaseModel):
    n: int
    theta_deg: float


class PeriodDesignRequest(BaseModel):
    theta_i_deg: float = Field(ge=-90, le=90)
    theta_t_deg: float = Field(ge=-90, le=90)
    lambda_mm: float = Field(default=5.0, gt=0)
    order: int = 1
    d0_mm: float | None = Field(default=None, gt=0)
    wells_per_row: int | None = Field(default=None, ge=1)


class PeriodDesignResponse(BaseModel):
    delta_mm: float
    order: int
    n_min: int
    n_max: int
    orders: list[OrderInfo]
    snapped: SnappedInfo | None = None
    mask: MaskDocument | None = None


class GridSpec(BaseModel):
    start: float = -90.0
    stop: float = 90.0
    step: float = Field(default=0.5, gt=0)


class SimulateRequest(BaseModel):
    mask: MaskDocument
    grid: GridSpec = GridSpec()


class BoundsRequest(BaseModel):
    trials: int = Field(default=1000, ge=1)
    m_min: int = Field(default=8, ge=1)
    m_max: int = Field(default=14, ge=1)
    seed: int = 0


class BoundsResponse(BaseModel):
    trials: int
    min_gamma_star: float
    bound: float
    violations: int
    witness_phases: list[float]
    witness_bits: str
    seed: int
    rotation_mean_amplitude: float


class ThinningRequest(BaseModel):
    theta_i_deg: float = Field(ge=-90, le=90)
    theta_t_deg: float = Field(ge=-90, le=90)
    d0_mm: float = Field(default=2.5, gt=0)
    lambda_mm: float = Field(default=5.0, gt=0)
    m_values: list[int] = Field(min_length=1)


class ThinningPoint(BaseModel):
    m: int
    eta: float


class ThinningResponse(BaseModel):
    points: list[ThinningPoint]


class StlRequest(BaseModel):
    mask: MaskDocument
    rows: int = Field(default=35, ge=1)
    solid: str = Field(pattern="^(base|pads|stencil)$")


class LayoutReportRequest(BaseModel):
    mask: MaskDocument
    rows: int = Field(default=35, ge=1)


class LayoutReportResponse(BaseModel):
    report: str
    on_count: int
    fill_fraction: float


class CompareRequest(BaseModel):
    measured_csv: str
    mount_csv: str | None = None
    mask: MaskDocument
    targets: list[float] = Field(min_length=1)
    floor_db: float = -60.0
    grid: GridSpec = GridSpec()


class TargetComparisonModel(BaseModel):
    theta: float
    found: bool
    angle_err_deg: float | None
    level_err_db: float | None


class CompareResponse(BaseModel):
    targets: list[TargetComparisonModel]
    rms_db: float
    floor_db: float
    normalized_csv: str


class FigureResponse(BaseModel):
    figure: str
    curves: dict[str, str]
