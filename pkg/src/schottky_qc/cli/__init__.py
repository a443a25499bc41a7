"""Command-line workbench: scene files, suite orchestration and reproducible artifacts."""

from .main import cli
from .scene import SCENE_VERSION, SCHEMA, Scene, WorkbenchError, load_scene, parse_scene

__all__ = ["SCENE_VERSION", "SCHEMA", "Scene", "WorkbenchError", "cli", "load_scene",
           "parse_scene"]
