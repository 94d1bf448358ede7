"""Category inventory: the bundled 29-way tagset and alias resolution.

The default inventory covers named entities and nominal concepts alike.
Long-form names (PERSON, LOCATION, ...) are resolved to the short
canonical labels through an explicit alias table; alternate inventories
can be supplied as a JSON file via the COREF_SEMSCORE_INVENTORY
environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Union

from .model import normalize_label

ENV_INVENTORY_VAR = "COREF_SEMSCORE_INVENTORY"


class UnknownLabelError(ValueError):
    """A category label that the active inventory cannot resolve."""


@dataclass(frozen=True)
class Category:
    label: str
    description: str = ""
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class CategoryInventory:
    categories: tuple[Category, ...]
    _canonical: frozenset[str] = field(init=False, repr=False)
    _alias_map: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "categories", tuple(self.categories))
        canonical = [c.label for c in self.categories]
        if len(set(canonical)) != len(canonical):
            raise ValueError("duplicate labels in category inventory")
        alias_map: dict[str, str] = {}
        for cat in self.categories:
            for alias in cat.aliases:
                target = alias_map.setdefault(alias, cat.label)
                if target != cat.label:
                    raise ValueError(f"alias {alias!r} maps to both {target} and {cat.label}")
        object.__setattr__(self, "_canonical", frozenset(canonical))
        object.__setattr__(self, "_alias_map", alias_map)

    def __len__(self) -> int:
        return len(self.categories)

    def __contains__(self, label: str) -> bool:
        return label in self._canonical

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(c.label for c in self.categories)

    def resolve(self, raw: str) -> str:
        """Normalize a raw label string and map aliases to canonical labels."""
        label = normalize_label(raw)
        if label in self._canonical:
            return label
        if label in self._alias_map:
            return self._alias_map[label]
        raise UnknownLabelError(f"unknown category label {raw!r}")

    @classmethod
    def default(cls) -> "CategoryInventory":
        return _DEFAULT

    @classmethod
    def from_json(cls, source: Union[str, Path, IO[str]]) -> "CategoryInventory":
        """Load an inventory from a JSON list of {label, description, aliases}."""
        if hasattr(source, "read"):
            entries = json.load(source)
        else:
            with open(source, encoding="utf-8") as handle:
                entries = json.load(handle)
        if not isinstance(entries, list):
            raise ValueError("inventory file must contain a JSON list")
        categories = []
        for entry in entries:
            categories.append(
                Category(
                    label=normalize_label(entry["label"]),
                    description=entry.get("description", ""),
                    aliases=tuple(normalize_label(a) for a in entry.get("aliases", ())),
                )
            )
        return cls(tuple(categories))

    @classmethod
    def from_env(cls) -> "CategoryInventory":
        """The default inventory, or the file named by COREF_SEMSCORE_INVENTORY."""
        path = os.environ.get(ENV_INVENTORY_VAR)
        if path:
            return cls.from_json(path)
        return cls.default()


def _cat(label: str, description: str, *aliases: str) -> Category:
    return Category(label, description, aliases)


DEFAULT_CATEGORIES: tuple[Category, ...] = (
    _cat("ANIMAL", "non-human living creatures"),
    _cat("ARTIFACT", "human-made objects, tools, and products"),
    _cat("ASSET", "owned resources and holdings of economic value"),
    _cat("BIOLOGY", "organisms, cells, and other biological entities"),
    _cat("CELESTIAL", "astronomical bodies and objects"),
    _cat("CULTURE", "belief systems, traditions, and social practices"),
    _cat("DATETIME", "points and stretches of time"),
    _cat("DISCIPLINE", "fields of study, sports, and professional domains"),
    _cat("DISEASE", "illnesses and medical conditions"),
    _cat("EVENT", "happenings and activities tied to a time or place"),
    _cat("FEELING", "emotions and subjective sensations"),
    _cat("FOOD", "edible and drinkable items"),
    _cat("GROUP", "collections of people or animals"),
    _cat("LANGUAGE", "words, phrases, and other linguistic items"),
    _cat("LAW", "legal rules, rights, and principles"),
    _cat("LOC", "geographic places and natural features", "LOCATION"),
    _cat("MEASURE", "quantities, units, and numeric values"),
    _cat("MEDIA", "communication and entertainment content"),
    _cat("MONEY", "currencies and monetary amounts"),
    _cat("ORG", "organizations, institutions, and companies", "ORGANIZATION"),
    _cat("PART", "components of larger wholes"),
    _cat("PER", "individual people", "PERSON"),
    _cat("PLANT", "plants and plant species"),
    _cat("PROPERTY", "attributes of things, such as size, shape, or age"),
    _cat("PSYCH", "mental states and cognitive phenomena"),
    _cat("RELATION", "connections and associations between entities"),
    _cat("STRUCT", "buildings and other constructed works"),
    _cat("SUBSTANCE", "chemical and material substances"),
    _cat("SUPER", "mythological and religious figures", "SUPERNATURAL"),
)

_DEFAULT = CategoryInventory(DEFAULT_CATEGORIES)


def iter_descriptions(inventory: CategoryInventory) -> Iterable[tuple[str, str]]:
    for cat in inventory.categories:
        yield cat.label, cat.description
