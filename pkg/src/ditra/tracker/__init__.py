from ditra.tracker.state import (
    TemplateEntry,
    TrackerState,
    extract_template,
    init_state,
    update_templates,
)
from ditra.tracker.trace import Trace, read_trace, read_traces, track_sequence, write_trace
from ditra.tracker.tracker import DiTraTracker, OracleTracker, StaticTracker, Tracker

__all__ = [
    "DiTraTracker",
    "OracleTracker",
    "StaticTracker",
    "TemplateEntry",
    "Trace",
    "Tracker",
    "TrackerState",
    "extract_template",
    "init_state",
    "read_trace",
    "read_traces",
    "track_sequence",
    "update_templates",
    "write_trace",
]
