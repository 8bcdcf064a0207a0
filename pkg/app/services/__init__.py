"""
Service Layer
Pipeline stages, each usable on its own
"""

from app.services.pipeline_service import ActivityPipeline, RunResult

__all__ = ["ActivityPipeline", "RunResult"]
