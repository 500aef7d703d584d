"""
Cohort bookkeeping: manifests, patient-level splits and synthetic cohorts
"""

from .manifest import LabelScheme, PatientRecord, Recording, load_manifest, parse_gender, swallow_count
from .splits import Split, SplitPlan, assert_no_leakage, load_split_plan, make_splits, save_split_plan
from .synth import ClassProfile, SynthConfig, SyntheticCohort, generate_cohort, write_cohort
