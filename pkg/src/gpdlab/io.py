"""JSON ingestion of groupoids and actions, and the plain-text element format.

Groupoid files::

    {"preset": "pair:3"}
    {"preset": "group:S3"}
    {"preset": "disjoint_union", "parts": [{"preset": "pair:2"}, {"preset": "pair:1"}]}
    {"n": 2, "units": [0], "r": [0, 0], "s": [0, 0], "inv": [0, 1],
     "products": [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]}

``products`` lists composable triples (a, b, ab); alternatively ``mul`` gives
the full n×n table with -1 for non-composable pairs.

Action files carry a ``group`` (catalog name or ``{"table": ...}``) and either
``act`` (one row g·q per group element) or ``space`` plus generator ``images``.

Element files hold one ``id re [im]`` triple per line; ``#`` starts a comment.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .groupoid import FiniteGroupoid, build_groupoid, disjoint_union, group_groupoid, pair_groupoid
from .groups import FiniteGroup, get_group
from .transformation import GroupAction, TransformationGroupoid, action_from_homomorphism, transformation_groupoid


class FormatError(ValueError):
    pass


def _group(spec: Any) -> FiniteGroup:
    if isinstance(spec, str):
        return get_group(spec)
    if isinstance(spec, dict) and "table" in spec:
        return FiniteGroup(np.array(spec["table"]), tuple(spec.get("names", ())), spec.get("name", ""))
    raise FormatError(f"cannot read a group from {spec!r}")


def groupoid_from_dict(d: dict) -> FiniteGroupoid:
    preset = d.get("preset")
    if preset is not None:
        if preset == "disjoint_union":
            parts = d.get("parts")
            if not parts:
                raise FormatError("disjoint_union needs a non-empty 'parts' list")
            return disjoint_union(*(groupoid_from_dict(p) for p in parts), name=d.get("name", ""))
        kind, _, arg = preset.partition(":")
        if kind == "pair":
            try:
                return pair_groupoid(int(arg))
            except ValueError as exc:
                raise FormatError(f"bad pair preset {preset!r}") from exc
        if kind == "group":
            G = get_group(arg)
            return group_groupoid(G.table, G.names, name=G.name)
        raise FormatError(f"unknown preset {preset!r}")
    try:
        return build_groupoid(
            int(d["n"]), d["units"], d["r"], d["s"], d["inv"],
            np.array(d["mul"]) if "mul" in d else [tuple(t) for t in d["products"]],
            labels=d.get("labels", ()), name=d.get("name", ""),
        )
    except KeyError as exc:
        raise FormatError(f"groupoid description lacks {exc.args[0]!r}") from exc


def action_from_dict(d: dict) -> GroupAction:
    G = _group(d["group"])
    name = d.get("name", "")
    if "act" in d:
        return GroupAction(G, np.array(d["act"]), name=name)
    if "images" in d and "space" in d:
        images = {int(k): tuple(v) for k, v in d["images"].items()}
        a = action_from_homomorphism(G, images, int(d["space"]), name=name)
        if a is None:
            raise FormatError("generator images do not define a homomorphism into Sym(Q)")
        return a
    raise FormatError("action needs 'act' or 'space' with 'images'")


def load_instance(path: str | Path) -> tuple[FiniteGroupoid, TransformationGroupoid | None]:
    """Read a groupoid or action file; actions come back with their transformation groupoid."""
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(d, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if "group" in d:
        t = transformation_groupoid(action_from_dict(d))
        return t.groupoid, t
    return groupoid_from_dict(d), None


def parse_element(text: str, n: int) -> np.ndarray:
    coeffs = np.zeros(n, dtype=complex)
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise FormatError(f"line {lineno}: expected 'id re [im]'")
        try:
            i = int(parts[0])
            z = complex(float(parts[1]), float(parts[2]) if len(parts) == 3 else 0.0)
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        if not 0 <= i < n:
            raise IndexError(f"line {lineno}: id {i} outside 0..{n - 1}")
        if i in seen:
            raise FormatError(f"line {lineno}: id {i} given twice")
        seen.add(i)
        coeffs[i] = z
    return coeffs


def format_element(coeffs) -> str:
    return "".join(f"{i} {float(z.real)!r} {float(z.imag)!r}\n" for i, z in enumerate(np.asarray(coeffs)) if z != 0)
