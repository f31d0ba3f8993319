"""Compressive sampling of rational rogue waves in the Haar wavelet basis."""
from .cs_recovery import (
    BpConfig,
    Measurements,
    RecoveryResult,
    SensingPlan,
    basis_pursuit,
    coherence,
    make_plan,
    recover,
    sample,
)
from .detection import (
    DetectionReport,
    detect,
    locate_apex,
    normalized_rms,
    triangularity_score,
)
from .errors import *  # noqa: F401,F403
from .signal_model import (
    ComplexField,
    Grid1D,
    SolitonKind,
    akhmediev_peregrine,
    evaluate_field,
    peregrine,
    propagate_nlse,
)
from .wavelet import Scaleogram, haar_cwt, haar_dwt, haar_idwt

__version__ = "0.1.0"
