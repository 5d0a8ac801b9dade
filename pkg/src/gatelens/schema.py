"""Relational model: table schemas and the catalog fed to the interpreter.

The catalog file is JSON:

    {
      "domain_context": "free text",
      "tables": {
        "results": {
          "columns": {
            "name": {"type": "text", "nullable": false,
                     "description": "truck identifier",
                     "synonyms": ["truck", "trucks"]}
          }
        }
      }
    }

Column order is the JSON object order. All types here are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import UnknownColumnError, UnknownTableError
from .values import ColumnType

IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def check_identifier(name: str, what: str = "identifier") -> str:
    if not IDENT_RE.match(name):
        raise ValueError(f"invalid {what}: {name!r}")
    return name


@dataclass(frozen=True)
class Column:
    name: str
    type: ColumnType
    description: str = ""
    synonyms: tuple[str, ...] = ()

    def __post_init__(self):
        check_identifier(self.name, "column name")


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[Column, ...]

    def __post_init__(self):
        check_identifier(self.name, "table name")
        seen: set[str] = set()
        for col in self.columns:
            folded = col.name.lower()
            if folded in seen:
                raise ValueError(
                    f"duplicate column {col.name!r} in table {self.name!r}"
                )
            seen.add(folded)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    def find(self, name: str) -> Column:
        """Case-insensitive lookup returning the canonically-cased column."""
        folded = name.lower()
        for col in self.columns:
            if col.name.lower() == folded:
                return col
        raise UnknownColumnError(name, self.column_names)

    def index_of(self, name: str) -> int:
        folded = name.lower()
        for i, col in enumerate(self.columns):
            if col.name.lower() == folded:
                return i
        raise UnknownColumnError(name, self.column_names)

    def has(self, name: str) -> bool:
        folded = name.lower()
        return any(c.name.lower() == folded for c in self.columns)


@dataclass(frozen=True)
class Catalog:
    tables: tuple[TableSchema, ...]
    domain_context: str = ""
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        by_name: dict[str, TableSchema] = {}
        for t in self.tables:
            folded = t.name.lower()
            if folded in by_name:
                raise ValueError(f"duplicate table name {t.name!r}")
            by_name[folded] = t
        object.__setattr__(self, "_by_name", by_name)

    def find(self, name: str) -> TableSchema:
        """Case-insensitive lookup returning the canonically-named table."""
        try:
            return self._by_name[name.lower()]
        except KeyError:
            raise UnknownTableError(name) from None

    def has(self, name: str) -> bool:
        return name.lower() in self._by_name

    @property
    def table_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tables)


def catalog_from_dict(doc: dict) -> Catalog:
    tables = []
    for tname, tdoc in doc.get("tables", {}).items():
        columns = []
        for cname, cdoc in tdoc.get("columns", {}).items():
            columns.append(Column(
                name=cname,
                type=ColumnType(cdoc["type"], bool(cdoc.get("nullable", False))),
                description=cdoc.get("description", ""),
                synonyms=tuple(cdoc.get("synonyms", [])),
            ))
        tables.append(TableSchema(tname, tuple(columns)))
    return Catalog(tuple(tables), domain_context=doc.get("domain_context", ""))


def catalog_to_dict(catalog: Catalog) -> dict:
    return {
        "domain_context": catalog.domain_context,
        "tables": {
            t.name: {
                "columns": {
                    c.name: {
                        "type": c.type.kind,
                        "nullable": c.type.nullable,
                        "description": c.description,
                        "synonyms": list(c.synonyms),
                    }
                    for c in t.columns
                }
            }
            for t in catalog.tables
        },
    }


def load_catalog(path) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return catalog_from_dict(json.load(fh))


def save_catalog(catalog: Catalog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(catalog_to_dict(catalog), fh, indent=2)
        fh.write("\n")
