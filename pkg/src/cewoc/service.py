"""Live trial-conduct HTTP API.

One resource per trial: configuration plus an append-only outcome
transcript.  Posterior draws are never persisted; on restart the transcript
is replayed against the stored seed, which reproduces the pending
recommendation exactly.  Mutations are serialized per trial and guarded by
an optimistic revision token; reads serve immutable snapshots.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel, Field, model_validator

from .design import (DesignConfig, MtdCurveEstimate, TrialState, TrialStatus,
                     check_stopping, estimate_mtd_curve, new_trial,
                     next_cohort_doses, record_cohort_outcomes, schedule_alpha)
from .errors import CewocError
from .links import LinkKind
from .model import DosePair, DoseWindow, destandardize, mtd_curve_y
from .posterior import (ConditionalAxis, PosteriorDraws, PriorSpec,
                        SamplerConfig, fit_seed, gamma_per_draw,
                        sample_posterior)

BAND_ALPHAS = (0.25, 0.5, 0.75)


class WindowModel(BaseModel):
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    @model_validator(mode="after")
    def _ordered(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("window bounds must be strictly ordered")
        return self


class DesignModel(BaseModel):
    theta: float = Field(gt=0.0, lt=1.0)
    n_max: int = Field(gt=0)
    alpha_start: float = 0.25
    alpha_increment: float = 0.05
    alpha_cap: float = 0.5
    escalation_step_cap: float = 0.20
    stop_n1: int | None = None  # defaults to min(10, n_max)
    stop_xi1: float = 0.05
    stop_xi2: float = 0.80

    def to_config(self) -> "DesignConfig":
        fields = self.model_dump()
        if fields["stop_n1"] is None:
            fields["stop_n1"] = min(10, self.n_max)
        return DesignConfig(**fields)


class PriorModel(BaseModel):
    gamma_mean: float = 21.0
    gamma_variance: float = 540.0


class SamplerModel(BaseModel):
    n_iterations: int = 6000
    n_burnin: int = 2000
    thin: int = 2
    seed: int = 0
    adapt_interval: int = 50
    target_accept: float = 0.35


class CreateTrialRequest(BaseModel):
    window: WindowModel
    design: DesignModel
    prior: PriorModel = PriorModel()
    sampler: SamplerModel = SamplerModel()
    working_link: str = "logistic"
    interaction: bool = True
    idempotency_key: str | None = None


class OutcomesRequest(BaseModel):
    outcomes: list[int] = Field(min_length=2, max_length=2)
    expected_revision: int

    @model_validator(mode="after")
    def _binary(self):
        if any(t not in (0, 1) for t in self.outcomes):
            raise ValueError("outcomes must be 0 or 1")
        return self


@dataclass
class TrialResource:
    trial_id: str
    window: DoseWindow
    design: DesignConfig
    prior: PriorSpec
    sampler: SamplerConfig
    working_link: LinkKind
    interaction: bool
    state: TrialState
    revision: int
    idempotency_key: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    draws: PosteriorDraws | None = None
    estimate: MtdCurveEstimate | None = None


class TrialStore:
    """State-directory-backed registry of trials."""

    def __init__(self, state_dir: Path):
        self.state_dir = Path(state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self._trials: dict[str, TrialResource] = {}
        self._created: dict[str, dict] = {}  # idempotency key -> response
        self._registry_lock = threading.Lock()
        self._load_all()

    # -- persistence ------------------------------------------------------

    def _path(self, trial_id: str) -> Path:
        return self.state_dir / f"{trial_id}.json"

    def _creation_path(self) -> Path:
        return self.state_dir / "created.json"

    def persist(self, trial: TrialResource) -> None:
        payload = {
            "trial_id": trial.trial_id,
            "window": {"x_min": trial.window.x_min, "x_max": trial.window.x_max,
                       "y_min": trial.window.y_min, "y_max": trial.window.y_max},
            "design": trial.design.__dict__,
            "prior": {"gamma_mean": trial.prior.gamma_mean,
                      "gamma_variance": trial.prior.gamma_variance},
            "sampler": {"n_iterations": trial.sampler.n_iterations,
                        "n_burnin": trial.sampler.n_burnin,
                        "thin": trial.sampler.thin, "seed": trial.sampler.seed,
                        "adapt_interval": trial.sampler.adapt_interval,
                        "target_accept": trial.sampler.target_accept},
            "working_link": trial.working_link.value,
            "interaction": trial.interaction,
            "idempotency_key": trial.idempotency_key,
            "outcomes": [r.dlt for r in trial.state.data.records],
            "revision": trial.revision,
        }
        tmp = self._path(trial.trial_id).with_suffix(".tmp")
        with open(tmp, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        tmp.replace(self._path(trial.trial_id))

    def _persist_created(self) -> None:
        tmp = self._creation_path().with_suffix(".tmp")
        with open(tmp, "w") as fh:
            json.dump(self._created, fh, indent=2, sort_keys=True)
        tmp.replace(self._creation_path())

    def _load_all(self) -> None:
        if self._creation_path().exists():
            with open(self._creation_path()) as fh:
                self._created = json.load(fh)
        for path in sorted(self.state_dir.glob("*.json")):
            if path.name == "created.json":
                continue
            with open(path) as fh:
                payload = json.load(fh)
            self._trials[payload["trial_id"]] = _replay(payload)

    # -- access -----------------------------------------------------------

    def get(self, trial_id: str) -> TrialResource:
        trial = self._trials.get(trial_id)
        if trial is None:
            raise HTTPException(status_code=404,
                                detail=f"trial {trial_id} not found")
        return trial

    def add(self, trial: TrialResource) -> None:
        with self._registry_lock:
            self._trials[trial.trial_id] = trial

    def remember_creation(self, key: str, response: dict) -> None:
        with self._registry_lock:
            self._created[key] = response
            self._persist_created()

    def recall_creation(self, key: str) -> dict | None:
        return self._created.get(key)


def _refresh(trial: TrialResource) -> None:
    """Refit the posterior on the current transcript and advance the design."""
    k = len(trial.state.data)
    draws = sample_posterior(trial.state.data, trial.prior, trial.sampler,
                             trial.working_link, trial.interaction,
                             seed=fit_seed(trial.sampler.seed, k))
    trial.draws = draws
    trial.estimate = estimate_mtd_curve(draws, trial.design.theta)
    if k >= trial.design.n_max:
        trial.state.status = TrialStatus.COMPLETED
    elif (k >= trial.design.stop_n1
          and check_stopping(trial.state.data, draws, trial.design)):
        trial.state.status = TrialStatus.STOPPED_FOR_SAFETY
    else:
        next_cohort_doses(trial.state, draws, trial.design)


def _replay(payload: dict) -> TrialResource:
    trial = TrialResource(
        trial_id=payload["trial_id"],
        window=DoseWindow(**payload["window"]),
        design=DesignConfig(**payload["design"]),
        prior=PriorSpec(**payload["prior"]),
        sampler=SamplerConfig(**payload["sampler"]),
        working_link=LinkKind.parse(payload["working_link"]),
        interaction=bool(payload["interaction"]),
        state=None,  # type: ignore[arg-type]
        revision=1,
        idempotency_key=payload.get("idempotency_key"))
    trial.state = new_trial(trial.design)
    outcomes = payload["outcomes"]
    for i in range(0, len(outcomes), 2):
        record_cohort_outcomes(trial.state, outcomes[i], outcomes[i + 1])
        _refresh(trial)
        trial.revision += 1
    if trial.revision != payload["revision"]:
        raise CewocError(f"replay of {trial.trial_id} diverged from the "
                         f"stored revision")
    return trial


def _dose_payload(trial: TrialResource, dose: DosePair) -> dict:
    raw_x, raw_y = destandardize(trial.window, dose)
    return {"x": dose.x, "y": dose.y, "raw_x": raw_x, "raw_y": raw_y}


def _recommendation(trial: TrialResource) -> dict | None:
    if trial.state.pending_doses is None:
        return None
    first_index = len(trial.state.data) + 1
    return {
        "cohort": trial.state.next_cohort_index - 1,
        "alpha": trial.state.current_alpha,
        "patients": [
            {"index": first_index, **_dose_payload(trial, trial.state.pending_doses[0])},
            {"index": first_index + 1, **_dose_payload(trial, trial.state.pending_doses[1])},
        ],
    }


def _estimate_payload(est: MtdCurveEstimate | None) -> dict | None:
    if est is None:
        return None
    return {"rho00_hat": est.rho00_hat, "rho01_hat": est.rho01_hat,
            "rho10_hat": est.rho10_hat, "beta3_hat": est.beta3_hat,
            "link": est.link.value, "theta": est.theta,
            "interaction": est.interaction}


def _transcript_payload(trial: TrialResource) -> list[dict]:
    rows = []
    for rec in trial.state.data.records:
        raw_x, raw_y = destandardize(trial.window, rec.dose)
        rows.append({"index": rec.index, "cohort": rec.cohort,
                     "x": rec.dose.x, "y": rec.dose.y,
                     "raw_x": raw_x, "raw_y": raw_y, "t": rec.dlt})
    return rows


def _state_payload(trial: TrialResource) -> dict:
    return {
        "trial_id": trial.trial_id,
        "revision": trial.revision,
        "status": trial.state.status.value,
        "alpha": trial.state.current_alpha,
        "theta": trial.design.theta,
        "n_max": trial.design.n_max,
        "working_link": trial.working_link.value,
        "interaction": trial.interaction,
        "window": {"x_min": trial.window.x_min, "x_max": trial.window.x_max,
                   "y_min": trial.window.y_min, "y_max": trial.window.y_max},
        "transcript": _transcript_payload(trial),
        "pending": _recommendation(trial),
        "estimate": _estimate_payload(trial.estimate),
        "acceptance_rates": (list(trial.draws.acceptance_rates)
                             if trial.draws is not None else None),
    }


def _require_draws(trial: TrialResource) -> PosteriorDraws:
    if trial.draws is None:
        raise HTTPException(status_code=409,
                            detail="no posterior yet; record the first "
                                   "cohort outcomes first")
    return trial.draws


def _what_if(trial: TrialResource, alpha: float) -> dict:
    draws = _require_draws(trial)
    if trial.state.pending_doses is None:
        raise HTTPException(status_code=409,
                            detail="trial is not awaiting a cohort; nothing "
                                   "to preview")
    shadow = TrialState(data=trial.state.data,
                        next_cohort_index=trial.state.next_cohort_index - 1,
                        current_alpha=alpha, status=TrialStatus.ENROLLING,
                        pending_doses=None)
    config = DesignConfig(
        theta=trial.design.theta, n_max=trial.design.n_max,
        alpha_start=alpha, alpha_increment=0.0, alpha_cap=alpha,
        escalation_step_cap=trial.design.escalation_step_cap,
        stop_n1=trial.design.stop_n1, stop_xi1=trial.design.stop_xi1,
        stop_xi2=trial.design.stop_xi2)
    d1, d2 = next_cohort_doses(shadow, draws, config)
    first_index = len(trial.state.data) + 1
    return {"alpha": alpha, "binding": False,
            "patients": [{"index": first_index, **_dose_payload(trial, d1)},
                         {"index": first_index + 1, **_dose_payload(trial, d2)}]}


def create_app(state_dir: Path | str,
               console_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="cewoc trial service")
    store = TrialStore(Path(state_dir))
    app.state.store = store

    @app.post("/trials", status_code=201)
    def create_trial(req: CreateTrialRequest):
        if req.idempotency_key:
            previous = store.recall_creation(req.idempotency_key)
            if previous is not None:
                return previous
        try:
            window = DoseWindow(**req.window.model_dump())
            design = req.design.to_config()
            prior = PriorSpec(**req.prior.model_dump())
            sampler = SamplerConfig(**req.sampler.model_dump())
            link = LinkKind.parse(req.working_link)
        except CewocError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        trial = TrialResource(
            trial_id=uuid.uuid4().hex[:12], window=window, design=design,
            prior=prior, sampler=sampler, working_link=link,
            interaction=req.interaction, state=new_trial(design), revision=1,
            idempotency_key=req.idempotency_key)
        store.add(trial)
        store.persist(trial)
        response = {"trial_id": trial.trial_id, "revision": trial.revision,
                    "recommendation": _recommendation(trial)}
        if req.idempotency_key:
            store.remember_creation(req.idempotency_key, response)
        return response

    @app.post("/trials/{trial_id}/cohorts")
    def record_outcomes(trial_id: str, req: OutcomesRequest):
        trial = store.get(trial_id)
        with trial.lock:
            if trial.state.status is not TrialStatus.ENROLLING:
                raise HTTPException(status_code=409,
                                    detail=f"trial is {trial.state.status.value}")
            if req.expected_revision != trial.revision:
                raise HTTPException(
                    status_code=409,
                    detail=f"revision conflict: expected {req.expected_revision}, "
                           f"current {trial.revision}")
            record_cohort_outcomes(trial.state, *req.outcomes)
            _refresh(trial)
            trial.revision += 1
            store.persist(trial)
            return {
                "trial_id": trial.trial_id,
                "revision": trial.revision,
                "status": trial.state.status.value,
                "alpha": trial.state.current_alpha,
                "recommendation": _recommendation(trial),
                "estimate": _estimate_payload(trial.estimate),
                "acceptance_rates": list(trial.draws.acceptance_rates),
            }

    @app.get("/trials/{trial_id}")
    def get_trial(trial_id: str):
        return _state_payload(store.get(trial_id))

    @app.get("/trials/{trial_id}/mtd-curve")
    def get_mtd_curve(trial_id: str, n_points: int = Query(default=101, ge=2),
                      what_if_alpha: float | None = Query(default=None,
                                                          gt=0.0, le=0.5)):
        trial = store.get(trial_id)
        draws = _require_draws(trial)
        est = trial.estimate
        xs = np.linspace(0.0, 1.0, n_points)
        ys = np.clip(mtd_curve_y(est.as_params(), est.theta, xs), 0.0, 1.0)
        bands = {}
        for a in BAND_ALPHAS:
            gam = np.array([
                np.quantile(gamma_per_draw(draws, est.theta,
                                           ConditionalAxis.B_GIVEN_A, x), a)
                for x in xs])
            bands[f"{a:g}"] = gam
        points = []
        for i, x in enumerate(xs):
            std = DosePair(float(x), float(ys[i]))
            raw_x, raw_y = destandardize(trial.window, std)
            points.append({
                "x": float(x), "y_estimate": float(ys[i]),
                "raw_x": raw_x, "raw_y": raw_y,
                "bands": {k: float(v[i]) for k, v in bands.items()},
            })
        return {
            "trial_id": trial.trial_id,
            "revision": trial.revision,
            "theta": est.theta,
            "band_alphas": list(BAND_ALPHAS),
            "estimate": _estimate_payload(est),
            "points": points,
            "what_if": (_what_if(trial, what_if_alpha)
                        if what_if_alpha is not None else None),
        }

    @app.get("/trials/{trial_id}/safety")
    def get_safety(trial_id: str):
        trial = store.get(trial_id)
        draws = _require_draws(trial)
        threshold = trial.design.theta + trial.design.stop_xi1
        exceedance = float(np.mean(draws.rho00 > threshold))
        return {
            "trial_id": trial.trial_id,
            "revision": trial.revision,
            "n_evaluable": len(trial.state.data),
            "threshold": threshold,
            "exceedance_probability": exceedance,
            "xi2": trial.design.stop_xi2,
            "rule_active": len(trial.state.data) >= trial.design.stop_n1,
            "would_stop": exceedance > trial.design.stop_xi2,
            "status": trial.state.status.value,
        }

    if console_dir is not None and Path(console_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        # mounted last so the API routes above keep precedence
        app.mount("/", StaticFiles(directory=str(console_dir), html=True),
                  name="console")

    return app
