from .bounds import BoundsReport, full_report, tight_bounds_lp
from .classical import CanonicalModel, ComplianceType, ResponseType
from .epr import PolarizerAngles, toy_distribution, toy_embedding
from .exceptions import CausalBoundsError
from .quantum import QuantumLatentModel, observed_distribution, quantum_ace
from .trial import ObservedDistribution, TrialRecord, estimate

__all__ = [
    "TrialRecord",
    "ObservedDistribution",
    "estimate",
    "CanonicalModel",
    "ComplianceType",
    "ResponseType",
    "BoundsReport",
    "full_report",
    "tight_bounds_lp",
    "QuantumLatentModel",
    "observed_distribution",
    "quantum_ace",
    "PolarizerAngles",
    "toy_distribution",
    "toy_embedding",
    "CausalBoundsError",
]
