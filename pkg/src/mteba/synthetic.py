"""Synthetic effort datasets for demos and tests.

Projects have a function-point size, a few numeric drivers and one
categorical language attribute; effort grows with size, scaled by a
language-dependent productivity and multiplicative noise.
"""

from __future__ import annotations

import numpy as np

from .dataset import Column, Dataset, Project, Schema

SCHEMA = Schema((
    Column("Project", "id"),
    Column("TeamExp", "numeric"),
    Column("ManagerExp", "numeric"),
    Column("Length", "numeric"),
    Column("Transactions", "numeric"),
    Column("Entities", "numeric"),
    Column("PointsAdjust", "size_numeric"),
    Column("Language", "categorical"),
    Column("Effort", "effort"),
))

LANGUAGE_HOURS_PER_FP = {"L1": 9.0, "L2": 16.0, "L3": 30.0}


def make_dataset(n: int = 77, seed: int = 0, noise: float = 0.25) -> Dataset:
    rng = np.random.default_rng(seed)
    langs = list(LANGUAGE_HOURS_PER_FP)
    projects = []
    for i in range(n):
        transactions = float(rng.integers(10, 400))
        entities = float(rng.integers(5, 300))
        points = transactions + entities
        adjusted = round(points * rng.uniform(0.7, 1.3))
        team = float(rng.integers(0, 5))
        manager = float(rng.integers(0, 8))
        lang = langs[int(rng.choice(3, p=[0.55, 0.3, 0.15]))]
        hours = LANGUAGE_HOURS_PER_FP[lang] * (1.15 - 0.06 * team)
        effort = adjusted * hours * float(np.exp(rng.normal(0.0, noise)))
        length = float(max(1, round(effort / 600 + rng.normal(0, 2))))
        projects.append(Project(
            str(i + 1),
            (team, manager, length, transactions, entities, float(adjusted), lang),
            round(effort, 1),
            float(adjusted),
        ))
    return Dataset(SCHEMA, tuple(projects))


def to_csv(d: Dataset) -> str:
    """Render a dataset built on :data:`SCHEMA` back to CSV text."""
    lines = [",".join(d.schema.names)]
    for p in d.projects:
        team, manager, length, tr, ent, adj, lang = p.features
        cells = [p.id, team, manager, length, tr, ent, adj, lang, p.effort]
        lines.append(",".join(f"{c:g}" if isinstance(c, float) else str(c) for c in cells))
    return "\n".join(lines) + "\n"


def schema_text(schema: Schema = SCHEMA) -> str:
    return "".join(f"{c.name}:{c.kind}\n" for c in schema.columns)
