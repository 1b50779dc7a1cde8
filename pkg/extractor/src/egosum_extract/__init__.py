"""Frame-embedding extractor producing EGSM files for the summarizer."""

from .egsm import write_egsm
from .encoders import EncoderEnvironmentError, StubEncoder, TransformerEncoder
from .extract import ExtractionReport, ExtractorJob, extract
from .plan import select_frame_indices
from .video import DecodeError, iter_frames, probe

__version__ = "0.1.0"

__all__ = [
    "write_egsm",
    "EncoderEnvironmentError", "StubEncoder", "TransformerEncoder",
    "ExtractionReport", "ExtractorJob", "extract",
    "select_frame_indices",
    "DecodeError", "iter_frames", "probe",
]
