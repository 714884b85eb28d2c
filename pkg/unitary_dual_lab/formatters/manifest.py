"""Run manifests: the reproducibility record written once per command."""

import platform
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

from pydantic import BaseModel, Field

from .output import json_document


class RunManifest(BaseModel):
    """Command, arguments, configuration and outputs of one run."""

    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    config_sources: List[str] = Field(default_factory=list)
    seed: Optional[int] = None
    code_version: str
    python_version: str = Field(default_factory=platform.python_version)
    started_at: float = Field(default_factory=time.time)
    wall_time: float = 0.0
    outputs: List[str] = Field(default_factory=list)
    metrics: Dict[str, Any] = Field(default_factory=dict)
    extra: Dict[str, Any] = Field(default_factory=dict)

    def finish(self, metrics: Optional[Dict[str, Any]] = None) -> "RunManifest":
        """Stamp the wall time and attach a metrics snapshot."""
        self.wall_time = time.time() - self.started_at
        if metrics is not None:
            self.metrics = metrics
        return self

    def to_json(self) -> str:
        return json_document(self.model_dump())

    @staticmethod
    def path_for(output: Path) -> Path:
        """Manifest location next to an artifact: ``<output>.manifest.json``."""
        return output.with_name(output.name + ".manifest.json")

    def write(self, output: Optional[Path] = None, stream: Optional[TextIO] = None) -> Optional[Path]:
        """Write beside ``output``, or to ``stream`` (stderr by default) without one.

        Returns:
            The manifest path when written to a file
        """
        if output is not None:
            path = self.path_for(output)
            path.write_text(self.to_json(), encoding="utf-8")
            return path
        (stream or sys.stderr).write(self.to_json())
        return None
