"""
Synth tool: write a deterministic synthetic cohort to disk
"""

from typing import Any, Dict, Literal, Tuple

from pydantic import BaseModel, Field

from cohort.synth import SynthConfig, generate_cohort, write_cohort

from .base import Tool


class SynthParams(BaseModel):
    """Synth command parameters"""

    out: str = Field(..., description="Output directory")
    n_patients: int = Field(default=40, description="Patients to generate")
    swallows_per_patient: Tuple[int, int] = Field(default=(10, 15))
    abnormal_fraction: float = Field(default=0.5)
    sample_rate: int = Field(default=16000)
    separability: Literal["strict", "overlap"] = Field(default="strict")
    seed: int = Field(default=7)


class SynthTool(Tool):
    name = "synth"
    description = "Generate a synthetic cohort: manifest.csv, audio/*.wav and annotations/*.json"

    def execute(self, params: SynthParams) -> Dict[str, Any]:
        cfg = SynthConfig(
            n_patients=params.n_patients,
            swallows_per_patient=params.swallows_per_patient,
            abnormal_fraction=params.abnormal_fraction,
            sample_rate=params.sample_rate,
            separability=params.separability,
            seed=params.seed,
        )
        cohort = generate_cohort(cfg)
        manifest_path = write_cohort(cohort, params.out)
        return {
            "command": self.name,
            "config": cfg.model_dump(mode="json"),
            "manifest": str(manifest_path),
            "n_patients": len(cohort.labels),
            "n_abnormal": sum(cohort.labels.values()),
            "n_recordings": len(cohort.wavs),
            "n_swallows": sum(len(s) for s in cohort.true_segments.values()),
        }
