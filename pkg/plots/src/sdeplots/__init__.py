"""Render figures from the SDE experiment CSV artifacts."""

from .render import (
    SchemaError,
    main,
    read_convergence_csv,
    read_paths_csv,
    render_convergence,
    render_paths,
)

__all__ = [
    "SchemaError",
    "main",
    "read_convergence_csv",
    "read_paths_csv",
    "render_convergence",
    "render_paths",
]

__version__ = "0.1.0"
