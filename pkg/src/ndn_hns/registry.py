"""Registry of IoT application categories used as name root prefixes.

Codes other than ``SBC`` are local configuration shipped in
``data/registry.tsv``; deployments may load their own file.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import DuplicateCode, InvalidCode, UnknownCode

CODE_RE = re.compile(r"[A-Z]{1,8}")


def is_valid_code(code: object) -> bool:
    return isinstance(code, str) and CODE_RE.fullmatch(code) is not None


@dataclass(frozen=True)
class AppCategory:
    code: str
    title: str
    description: str = ""

    def __post_init__(self) -> None:
        if not is_valid_code(self.code):
            raise InvalidCode(f"invalid application code {self.code!r}: expected 1-8 uppercase ASCII letters")
        if not self.title:
            raise InvalidCode(f"category {self.code} has an empty title")
        if "\t" in self.title or "\n" in self.title or "\t" in self.description or "\n" in self.description:
            raise InvalidCode(f"category {self.code}: title and description must be single-line, tab-free text")


@dataclass(frozen=True)
class Registry:
    entries: tuple[AppCategory, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entry in self.entries:
            if entry.code in seen:
                raise DuplicateCode(f"duplicate application code {entry.code!r}")
            seen.add(entry.code)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, code: object) -> bool:
        return any(entry.code == code for entry in self.entries)

    def codes(self) -> list[str]:
        return [entry.code for entry in self.entries]

    def to_tsv(self) -> str:
        return "".join(f"{e.code}\t{e.title}\t{e.description}\n" for e in self.entries)

    @classmethod
    def from_tsv(cls, text: str) -> Registry:
        entries = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise InvalidCode(f"line {lineno}: expected CODE<TAB>Title<TAB>Description")
            entries.append(AppCategory(*fields))
        return cls(tuple(entries))


def load_registry(path: str | Path) -> Registry:
    return Registry.from_tsv(Path(path).read_text(encoding="utf-8"))


def default_registry() -> Registry:
    """The fourteen built-in IoT application categories."""
    text = resources.files(__package__).joinpath("data/registry.tsv").read_text(encoding="utf-8")
    return Registry.from_tsv(text)


def lookup(registry: Registry, code: str) -> AppCategory:
    for entry in registry.entries:
        if entry.code == code:
            return entry
    raise UnknownCode(f"unknown application code {code!r}")


def register(registry: Registry, category: AppCategory) -> Registry:
    """Return a new registry with ``category`` appended; ``registry`` is untouched."""
    if not isinstance(category, AppCategory):
        raise InvalidCode("expected an AppCategory")
    if category.code in registry:
        raise DuplicateCode(f"application code {category.code!r} is already registered")
    return Registry(registry.entries + (category,))
