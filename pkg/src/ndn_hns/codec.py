"""Canonical text form of names.

Grammar (canonical form)::

    name      = "IoT://" code ":" hc [ ":" ac ] [ ":" fc ]
    hc        = portion *6( "/" portion )
    ac        = subpart *( ":/" subpart )
    fc        = digest ":/" digest ":/" digest

AC sub-parts appear in a fixed order: ``key/value`` attribute pairs, the
freshness selector (``0``, ``1`` or ``ts/<int>``), the popularity counter
(bare integer) and the task (``sense/...`` or ``action/...``).

Inside portions ``%``, ``/``, ``:``, space and ASCII control characters are
percent-encoded. Sub-parts are classified on their raw text before
decoding, which is what lets the encoder disambiguate the few collisions
the bare grammar has:

* attribute keys spelled ``ts``, ``sense`` or ``action`` get their first
  character escaped (``%74s``);
* a popularity of 0 or 1 without a freshness selector is written ``%30`` /
  ``%31`` so it is not read back as a selector;
* ``/`` inside a Base64 digest is written ``%2F``.
"""

from __future__ import annotations

import base64
import binascii
import re
from urllib.parse import unquote

from .errors import BadDigest, HnsError, NameParseError, NameSyntaxError, UnknownScheme
from .name import (
    HC_ARITY,
    SCHEME,
    AttributePair,
    AttributesComponent,
    Digest,
    Encoding,
    FlatComponent,
    FreshnessKind,
    FreshnessSpec,
    HierarchicalComponent,
    Name,
    NamePrefix,
    RootPrefix,
    TaskSpec,
    TaskType,
)
from .registry import is_valid_code

_ESCAPES = {c: f"%{c:02X}" for c in [*range(0x20), 0x7F, ord("%"), ord("/"), ord(":"), ord(" ")]}
_RESERVED_KEYS = frozenset({"ts", "sense", "action"})

_SCHEME_RE = re.compile(r"([A-Za-z][A-Za-z0-9+.\-]*)://")
_SEP_RE = re.compile(r":/?")
_BAD_ESCAPE_RE = re.compile(r"%(?![0-9A-Fa-f]{2})")
_CONTROL_RE = re.compile(r"[\x00-\x1f\x7f]")
_UINT_RE = re.compile(r"0|[1-9][0-9]*")
_BARE_RE = re.compile(r"(?:[0-9]|%3[0-9])+")
_HEX64_RE = re.compile(r"[0-9a-f]{64}")
_B64_RE = re.compile(r"(?:[A-Za-z0-9+]|%2[Ff]){43}=")
_TRUNC_RE = re.compile(r"[0-9a-f]{1,64}(?:\.\.\.)?")
_TRUNC_RUN_RE = re.compile(r"(?:[0-9a-f]{1,64}\.\.\./?)*[0-9a-f]{1,64}(?:\.\.\.)?/?")


# encoding

def escape(value: str) -> str:
    return value.translate(_ESCAPES)


def _escape_key(key: str) -> str:
    text = escape(key)
    if text in _RESERVED_KEYS:
        text = f"%{ord(text[0]):02X}{text[1:]}"
    return text


def render_digest(digest: Digest, encoding: Encoding) -> str:
    """Text of one digest as it appears inside a name."""
    if digest.truncated:
        return digest.hex + "..."
    if encoding is Encoding.HEX:
        return digest.hex
    return base64.b64encode(digest.raw).decode("ascii").replace("/", "%2F")


def _ac_subparts(ac: AttributesComponent) -> list[str]:
    out = [f"{_escape_key(k)}/{escape(v)}" for k, v in ac.attributes]
    fresh = ac.freshness
    if fresh is not None:
        if fresh.kind is FreshnessKind.LATEST:
            out.append("0")
        elif fresh.kind is FreshnessKind.OLDEST:
            out.append("1")
        else:
            out.append(f"ts/{fresh.timestamp}")
    if ac.popularity is not None:
        if fresh is None and ac.popularity in (0, 1):
            out.append(f"%3{ac.popularity}")
        else:
            out.append(str(ac.popularity))
    if ac.task is not None:
        out.append(f"{ac.task.task_type.value}/{escape(ac.task.task_sub_type)}")
    return out


def _root_text(root: RootPrefix) -> str:
    return f"{root.scheme}://{root.app_code}"


def serialize(name: Name) -> str:
    parts = [_root_text(name.root), "/".join(escape(p) for p in name.hc.portions)]
    if name.ac is not None:
        parts.append(":/".join(_ac_subparts(name.ac)))
    if name.fc is not None:
        parts.append(":/".join(render_digest(d, name.fc.encoding) for d in name.fc.digests))
    return ":".join(parts)


def serialize_prefix(prefix: NamePrefix) -> str:
    return _root_text(prefix.root) + ":" + "/".join(escape(p) for p in prefix.portions)


# decoding

class _Parser:
    def __init__(self, text: str, lenient: bool, schema: tuple[str, ...] | None):
        if not isinstance(text, str):
            raise NameSyntaxError("name text must be a string", 0)
        self.text = text
        self.lenient = lenient
        self.schema = schema

    def offset(self, index: int) -> int:
        return len(self.text[:index].encode("utf-8", "surrogatepass"))

    def fail(self, message: str, index: int, cls=NameSyntaxError):
        raise cls(message, self.offset(index))

    def decode(self, raw: str, index: int) -> str:
        if not raw:
            self.fail("empty portion", index)
        bad = _BAD_ESCAPE_RE.search(raw)
        if bad:
            self.fail("malformed percent-escape", index + bad.start())
        ctl = _CONTROL_RE.search(raw)
        if ctl:
            self.fail("unescaped control character", index + ctl.start())
        try:
            return unquote(raw, errors="strict")
        except UnicodeDecodeError:
            self.fail("percent-escapes do not form valid UTF-8", index)

    def portions(self, raw: str, index: int) -> list[tuple[str, int]]:
        """Split a sub-part on '/', tolerating one trailing separator."""
        if len(raw) > 1 and raw.endswith("/"):
            raw = raw[:-1]
        out, pos = [], index
        for piece in raw.split("/"):
            if not piece:
                self.fail("empty portion", pos)
            out.append((piece, pos))
            pos += len(piece) + 1
        return out

    def components(self, start: int) -> list[list[tuple[str, int]]]:
        text = self.text
        end = len(text)
        # abbreviated names often end with a stray ':/'; only lenient mode tolerates it
        if self.lenient and text.endswith(":/"):
            end -= 2
        elif self.lenient and text.endswith(":"):
            end -= 1
        comps: list[list[tuple[str, int]]] = [[]]
        pos = start
        for m in _SEP_RE.finditer(text, start, end):
            if m.start() == pos:
                self.fail("empty name part", pos)
            comps[-1].append((text[pos : m.start()], pos))
            if m.group() == ":":
                comps.append([])
            pos = m.end()
        if pos >= end:
            self.fail("empty name part", pos)
        comps[-1].append((text[pos:end], pos))
        return comps

    def root(self) -> tuple[RootPrefix, list[list[tuple[str, int]]]]:
        m = _SCHEME_RE.match(self.text)
        if m is None:
            self.fail(f"missing {SCHEME}:// scheme", 0, UnknownScheme)
        if m.group(1) != SCHEME:
            self.fail(f"unknown scheme {m.group(1)!r}", 0, UnknownScheme)
        comps = self.components(m.end())
        code_parts = comps[0]
        if len(code_parts) != 1 or not is_valid_code(code_parts[0][0]):
            self.fail("application code must be 1-8 uppercase ASCII letters", m.end())
        return RootPrefix(code_parts[0][0]), comps

    def hc_portions(self, comp: list[tuple[str, int]]) -> list[str]:
        if len(comp) != 1:
            self.fail("hierarchical component cannot contain ':/'", comp[1][1] - 2)
        raw, index = comp[0]
        return [self.decode(p, i) for p, i in self.portions(raw, index)]

    def attributes(self, comp: list[tuple[str, int]]) -> AttributesComponent:
        pairs: list[AttributePair] = []
        freshness = popularity = task = None
        stage = 0  # 0 attrs, 1 freshness, 2 popularity, 3 task

        def advance(to: int, index: int) -> None:
            nonlocal stage
            if to < stage or (to == stage and to > 0):
                self.fail("attribute sub-parts out of order or repeated", index)
            stage = to

        for n, (raw, index) in enumerate(comp):
            if len(raw) > 1 and raw.endswith("/") and "/" not in raw[:-1]:
                raw = raw[:-1]
            if "/" not in raw:
                if not _BARE_RE.fullmatch(raw):
                    self.fail(f"unrecognised attribute sub-part {raw!r}", index)
                if raw in ("0", "1") and stage < 1:
                    advance(1, index)
                    freshness = FreshnessSpec.latest() if raw == "0" else FreshnessSpec.oldest()
                    continue
                value = self.decode(raw, index)
                if not _UINT_RE.fullmatch(value):
                    self.fail("popularity must be a non-negative integer", index)
                advance(2, index)
                popularity = int(value)
                continue
            parts = self.portions(raw, index)
            head = parts[0][0]
            if self.schema and n == 0 and len(parts) == len(self.schema) and head not in ("ts", "sense", "action"):
                advance(0, index)
                pairs.extend(AttributePair(k, self.decode(p, i)) for k, (p, i) in zip(self.schema, parts))
                continue
            if len(parts) != 2:
                self.fail("attribute sub-part must have exactly two portions", index)
            (_, _), (second, second_at) = parts
            if head == "ts":
                if not _UINT_RE.fullmatch(second):
                    self.fail("freshness timestamp must be a non-negative integer", second_at)
                advance(1, index)
                freshness = FreshnessSpec.generated_at(int(second))
            elif head in ("sense", "action"):
                advance(3, index)
                task = TaskSpec(TaskType(head), self.decode(second, second_at))
            else:
                advance(0, index)
                pairs.append(AttributePair(self.decode(head, index), self.decode(second, second_at)))
        return AttributesComponent(tuple(pairs), freshness, popularity, task)

    def is_flat(self, comp: list[tuple[str, int]]) -> bool:
        for raw, _ in comp:
            if "/" in raw and not (self.lenient and _TRUNC_RUN_RE.fullmatch(raw)):
                return False
        return not (len(comp) <= 2 and all(_BARE_RE.fullmatch(raw) for raw, _ in comp))

    def flat(self, comp: list[tuple[str, int]]) -> FlatComponent:
        items = comp
        if self.lenient:
            items = []
            for raw, index in comp:
                if "..." in raw and _TRUNC_RUN_RE.fullmatch(raw):
                    for m in re.finditer(r"[0-9a-f]+(?:\.\.\.)?", raw):
                        items.append((m.group(), index + m.start()))
                else:
                    items.append((raw, index))
        if len(items) != 3:
            self.fail(f"flat component needs 3 digests, got {len(items)}", comp[0][1], BadDigest)
        digests, encodings = [], set()
        for raw, index in items:
            if _HEX64_RE.fullmatch(raw):
                digests.append(Digest(raw))
                encodings.add(Encoding.HEX)
            elif _B64_RE.fullmatch(raw):
                text = raw.replace("%2F", "/").replace("%2f", "/")
                try:
                    data = base64.b64decode(text, validate=True)
                except binascii.Error:
                    self.fail("invalid Base64 digest", index, BadDigest)
                if len(data) != 32 or base64.b64encode(data).decode("ascii") != text:
                    self.fail("Base64 digest is not a canonical 32-byte value", index, BadDigest)
                digests.append(Digest.from_bytes(data))
                encodings.add(Encoding.BASE64)
            elif self.lenient and _TRUNC_RE.fullmatch(raw):
                digests.append(Digest(raw.removesuffix("...")))
                encodings.add(Encoding.HEX)
            else:
                self.fail(f"not a valid hex or Base64 SHA-256 digest: {raw!r}", index, BadDigest)
        if len(encodings) != 1:
            self.fail("flat component mixes hex and Base64 digests", comp[0][1], BadDigest)
        return FlatComponent(*digests, encoding=encodings.pop())

    def name(self) -> Name:
        root, comps = self.root()
        if len(comps) < 2:
            self.fail("missing hierarchical component", len(self.text))
        hc_comp = comps[1]
        portions = self.hc_portions(hc_comp)
        if len(portions) != HC_ARITY:
            raw, index = hc_comp[0]
            self.fail(f"hierarchical component needs {HC_ARITY} portions, got {len(portions)}", index + len(raw))
        extra = comps[2:]
        if len(extra) > 2:
            self.fail("too many name components", extra[2][0][1])
        ac = fc = None
        if len(extra) == 2:
            ac, fc = self.attributes(extra[0]), self.flat(extra[1])
        elif extra:
            if self.is_flat(extra[0]):
                fc = self.flat(extra[0])
            else:
                ac = self.attributes(extra[0])
        return Name(root, HierarchicalComponent(*portions), ac, fc)

    def prefix(self) -> NamePrefix:
        root, comps = self.root()
        if len(comps) != 2:
            self.fail("prefix must be root plus one hierarchical part", len(self.text))
        portions = self.hc_portions(comps[1])
        if len(portions) > HC_ARITY:
            self.fail(f"prefix has more than {HC_ARITY} portions", comps[1][0][1])
        return NamePrefix(root, tuple(portions))


def parse(text: str, *, lenient: bool = False, schema: tuple[str, ...] | None = None) -> Name:
    """Parse name text.

    ``lenient`` accepts abbreviated hex digests such as ``968cbab1de...``.
    ``schema`` names positional attribute values: with
    ``schema=("session", "date")`` an AC sub-part ``14/01-Jan`` becomes two
    attribute pairs. Neither mode produces text that serializes back
    identically.
    """
    parser = _Parser(text, lenient, tuple(schema) if schema else None)
    try:
        return parser.name()
    except NameParseError:
        raise
    except HnsError as exc:
        raise NameSyntaxError(str(exc), 0) from exc


def parse_prefix(text: str) -> NamePrefix:
    parser = _Parser(text, False, None)
    try:
        return parser.prefix()
    except NameParseError:
        raise
    except HnsError as exc:
        raise NameSyntaxError(str(exc), 0) from exc
