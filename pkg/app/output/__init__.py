"""
Output files written by the pipeline
"""

from app.output.writers import (
    CLEANSE_REPORT_FILE,
    COUNTS_FILE,
    MANIFEST_FILE,
    REJECTED_FILE,
    REJECTED_REPORT_FILE,
    TRAVEL_TIME_FILE,
    write_json,
)

__all__ = [
    "CLEANSE_REPORT_FILE",
    "COUNTS_FILE",
    "MANIFEST_FILE",
    "REJECTED_FILE",
    "REJECTED_REPORT_FILE",
    "TRAVEL_TIME_FILE",
    "write_json",
]
