"""
SwallowSense HTTP service
FastAPI endpoints that segment, featurise and score a single uploaded WAV recording
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import ValidationError

# Load environment variables
load_dotenv()

from audio.wav_io import AudioClip, load_wav
from auth.api_key import verify_api_key
from errors import SwallowSenseError
from model.forest import Forest
from model.serialization import load_forest
from services.pipeline import SegmentationMode, pipeline
from segmentation.detector import SegmentationParams
from settings import get_settings

logger = logging.getLogger(__name__)

SERVICE_VERSION = "1.0.0"

# Create FastAPI app
app = FastAPI(
    title="SwallowSense",
    description="Swallow-sound segmentation, feature extraction and dysphagia risk scoring",
    version=SERVICE_VERSION
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.exception_handler(SwallowSenseError)
async def swallowsense_error_handler(request: Request, exc: SwallowSenseError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": f"{type(exc).__name__}: {exc}"})


@app.exception_handler(ValidationError)
async def validation_error_handler(request: Request, exc: ValidationError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@lru_cache(maxsize=4)
def _load_cached_forest(path: str) -> Forest:
    logger.info(f"loading forest from {path}")
    return load_forest(path)


def get_forest() -> Forest:
    """Forest configured by SWALLOWSENSE_MODEL_PATH; 503 when none is available"""
    path = get_settings().model_path
    if not path or not Path(path).exists():
        raise HTTPException(status_code=503, detail="No trained model configured (SWALLOWSENSE_MODEL_PATH)")
    return _load_cached_forest(path)


async def read_clip(request: Request) -> AudioClip:
    """Request body as a WAV clip"""
    body = await request.body()
    return load_wav(body, source_id="upload")


def segmentation_params(
    top_db: float = Query(20.0),
    gap_time: float = Query(0.6),
    min_amplitude: float = Query(0.0),
    max_amplitude: float = Query(2.0),
) -> SegmentationParams:
    return SegmentationParams(
        top_db=top_db, gap_time=gap_time, min_amplitude=min_amplitude, max_amplitude=max_amplitude
    )


def automatic_mode(mode: str = Query("fixed", pattern="^(fixed|sliding)$")) -> SegmentationMode:
    return SegmentationMode(mode)


# Health check endpoint (no auth required)
@app.get("/health")
async def health_check() -> Dict[str, Any]:
    """Health check endpoint"""
    model_path = get_settings().model_path
    return {
        "status": "healthy",
        "service": "swallowsense",
        "version": SERVICE_VERSION,
        "model_loaded": bool(model_path and Path(model_path).exists()),
    }


@app.post("/segment")
def segment_recording(
    api_key: str = Depends(verify_api_key),
    clip: AudioClip = Depends(read_clip),
    mode: SegmentationMode = Depends(automatic_mode),
    params: SegmentationParams = Depends(segmentation_params)
) -> Dict[str, Any]:
    """Swallow segments of an uploaded WAV"""
    segments = pipeline.segment_clip(clip, mode, params)
    return {
        "mode": mode.value,
        "duration_s": clip.duration_s,
        "sample_rate": clip.sample_rate,
        "total_segments": len(segments),
        "segments": [s.model_dump() for s in segments],
    }


@app.post("/features")
def recording_features(
    api_key: str = Depends(verify_api_key),
    age: float = Query(..., gt=0),
    gender: int = Query(..., ge=0, le=1),
    clip: AudioClip = Depends(read_clip),
    mode: SegmentationMode = Depends(automatic_mode),
    params: SegmentationParams = Depends(segmentation_params)
) -> Dict[str, Any]:
    """Per-swallow feature vectors of an uploaded WAV"""
    segments = pipeline.segment_clip(clip, mode, params)
    features = pipeline.clip_features(clip, segments, (age, gender))
    return {
        "mode": mode.value,
        "total_segments": len(segments),
        "swallows": [
            {"segment": seg.model_dump(), "features": feat.model_dump()}
            for seg, feat in zip(segments, features)
        ],
    }


@app.post("/predict")
def predict_recording(
    api_key: str = Depends(verify_api_key),
    forest: Forest = Depends(get_forest),
    patient_id: str = Query(...),
    age: float = Query(..., gt=0),
    gender: int = Query(..., ge=0, le=1),
    swallow_count: Optional[int] = Query(None, ge=1, description="Patient swallow total; defaults to the swallows detected"),
    clip: AudioClip = Depends(read_clip),
    mode: SegmentationMode = Depends(automatic_mode),
    params: SegmentationParams = Depends(segmentation_params)
) -> Dict[str, Any]:
    """Mean, max and mode risk of an uploaded WAV"""
    report = pipeline.score_clip(forest, patient_id, clip, (age, gender), mode, params, swallow_count)
    if report is None:
        raise HTTPException(status_code=422, detail="No swallow detected in the recording")
    return {"mode": mode.value, "risk_report": report.model_dump()}


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    uvicorn.run(
        "server:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
        log_level="info"
    )
