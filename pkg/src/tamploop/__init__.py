"""Closed-loop language-to-PDDL task and motion planning on a dual-arm tabletop."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def asset_path(*parts: str) -> Path:
    """Path to a packaged asset (domain file, descriptions, prompt templates)."""
    return Path(resources.files("tamploop").joinpath("assets", *parts))


def load_cooking_domain():
    """The bundled cooking domain with its description sidecar attached."""
    from .pddl import load_descriptions, parse_domain

    domain = parse_domain(asset_path("cooking_domain.pddl").read_text(encoding="utf-8"))
    desc = load_descriptions(asset_path("cooking_descriptions.json"), domain)
    return type(domain)(domain.name, domain.requirements, domain.predicates,
                        domain.actions, descriptions=desc, warnings=domain.warnings)
