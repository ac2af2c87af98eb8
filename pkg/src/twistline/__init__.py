"""Second-moment transport of quantum wave packets through axially symmetric
electric and magnetic elements."""

from .constants import ELECTRON, HMINUS, PROTON, ParticleSpecies, field_scales, species_constants
from .errors import DomainError, TransportError, TwistlineError, VerificationError
from .packets import Family, PacketSpec, TransverseMoments, moments_1d, moments_transverse

__all__ = [
    "ELECTRON", "HMINUS", "PROTON", "ParticleSpecies", "field_scales", "species_constants",
    "DomainError", "TransportError", "TwistlineError", "VerificationError",
    "Family", "PacketSpec", "TransverseMoments", "moments_1d", "moments_transverse",
]
__version__ = "0.1.0"
