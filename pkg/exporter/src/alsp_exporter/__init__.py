"""alsp-exporter: dump speech-LM hidden states into alsp trace files."""

from .export import (
    HookAttachmentError,
    ModelLoadError,
    export_trace,
    load_model,
    read_timestamps,
    read_wav,
)
from .traceformat import FormatWriteError, write_trace_file

__version__ = "0.1.0"
