"""Ordered labeled trees: the XML subset, paths, and (de)serialization.

Documents are modeled as ordered trees whose nodes carry a unique integer
identifier, an element label, and either a text payload or an ordered list
of child trees.  Identifiers never appear in serialized output; equality is
always decided on the identifier-free value tree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence
from xml.parsers import expat

from .errors import (
    MalformedXml,
    NonDistinctPathNames,
    UnknownDocument,
    UnsupportedFeature,
)

_COUNTER = itertools.count(1)


def fresh_id() -> int:
    """Return the next process-wide node identifier."""
    return next(_COUNTER)


class XmlTree:
    """One node of an ordered labeled tree.

    Exactly one of ``text`` and ``children`` is set.  An element with an
    empty child list is distinct from a text leaf holding the empty string.
    Instances compare by identity; use :func:`value_equal` for comparison on
    value trees.
    """

    __slots__ = ("node_id", "label", "text", "children")

    def __init__(
        self,
        label: str,
        text: Optional[str] = None,
        children: Optional[list["XmlTree"]] = None,
        node_id: Optional[int] = None,
    ) -> None:
        if (text is None) == (children is None):
            raise ValueError("a node holds either text or children, never both")
        self.node_id = fresh_id() if node_id is None else node_id
        self.label = label
        self.text = text
        self.children = children

    @property
    def is_text(self) -> bool:
        return self.text is not None

    def __repr__(self) -> str:
        if self.is_text:
            return f"XmlTree({self.label}:{self.text!r} #{self.node_id})"
        return f"XmlTree({self.label}[{len(self.children or [])}] #{self.node_id})"


def element(label: str, children: Iterable[XmlTree] = ()) -> XmlTree:
    return XmlTree(label, children=list(children))


def text_leaf(label: str, text: str) -> XmlTree:
    return XmlTree(label, text=text)


def value_equal(a: XmlTree, b: XmlTree) -> bool:
    """True iff the identifier-free value trees of ``a`` and ``b`` are identical.

    Comparison is ordered and recursive: label, content kind, text, child
    count and child order must all agree.
    """
    if a.label != b.label or a.is_text != b.is_text:
        return False
    if a.is_text:
        return a.text == b.text
    ac, bc = a.children or [], b.children or []
    if len(ac) != len(bc):
        return False
    return all(value_equal(x, y) for x, y in zip(ac, bc))


def copy_tree(
    t: XmlTree,
    preserve_ids: bool = False,
    id_map: Optional[dict[int, int]] = None,
) -> XmlTree:
    """Deep-copy a tree.

    With ``preserve_ids`` the copy reuses the original identifiers (used
    for snapshotting a store before edits).  Otherwise fresh identifiers
    are assigned; ``id_map`` is then filled with fresh-id -> source-id.
    """
    node_id = t.node_id if preserve_ids else fresh_id()
    if id_map is not None and not preserve_ids:
        id_map[node_id] = t.node_id
    if t.is_text:
        return XmlTree(t.label, text=t.text, node_id=node_id)
    kids = [copy_tree(c, preserve_ids, id_map) for c in t.children or []]
    return XmlTree(t.label, children=kids, node_id=node_id)


def iter_nodes(t: XmlTree) -> Iterator[XmlTree]:
    """Yield every node of the tree in document (preorder) order."""
    yield t
    for c in t.children or []:
        yield from iter_nodes(c)


def string_value(t: XmlTree) -> str:
    """Concatenation of all descendant text in document order."""
    if t.is_text:
        return t.text or ""
    return "".join(string_value(c) for c in t.children or [])


def locate(ctx: XmlTree, names: Sequence[str]) -> list[XmlTree]:
    """All subtrees reached from ``ctx`` by descending one child level per name.

    The first name matches children of ``ctx`` (relative semantics).  The
    result is in document order and may be empty.  An empty name sequence
    locates ``ctx`` itself.
    """
    nodes = [ctx]
    for name in names:
        nodes = [
            c
            for n in nodes
            if not n.is_text
            for c in n.children or []
            if c.label == name
        ]
    return nodes


def parent_index(root: XmlTree) -> dict[int, XmlTree]:
    """Map node id -> parent node for every non-root node under ``root``."""
    idx: dict[int, XmlTree] = {}
    for node in iter_nodes(root):
        for c in node.children or []:
            idx[c.node_id] = node
    return idx


# ----------------------------------------------------------------------
# Paths

@dataclass(frozen=True)
class Path:
    """A non-empty slash path of pairwise distinct element names."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise NonDistinctPathNames("a path needs at least one name")
        if len(set(self.names)) != len(self.names):
            raise NonDistinctPathNames(
                "path names must be pairwise distinct: " + "/".join(self.names)
            )


def last_name(p: Path) -> str:
    """The last element name of a path."""
    return p.names[-1]


@dataclass(frozen=True)
class DocRoot:
    doc: str


@dataclass(frozen=True)
class VarRoot:
    var: str


@dataclass(frozen=True)
class ViewRootMark:
    """Root marker for paths anchored at the (virtual) view instance."""


VIEW_ROOT = ViewRootMark()


@dataclass(frozen=True)
class QualifiedPath:
    """A name sequence anchored at a document, a variable, or the view root.

    For document- and view-rooted paths the first step repeats the root
    label of the addressed tree; callers check it and locate the remainder
    relative to the root.
    """

    root: object  # DocRoot | VarRoot | ViewRootMark
    steps: tuple[str, ...] = ()


def is_prefix(a: QualifiedPath, b: QualifiedPath) -> bool:
    """True iff ``a`` and ``b`` share a root and a's names are a (possibly
    equal) prefix of b's."""
    return a.root == b.root and b.steps[: len(a.steps)] == a.steps


# ----------------------------------------------------------------------
# Parsing and serialization of the XML subset

_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;"}


def _escape(s: str) -> str:
    return "".join(_ESCAPES.get(c, c) for c in s)


def serialize(t: XmlTree) -> str:
    """Canonical serialization: no insignificant whitespace, stored child order.

    An element with no children serializes as ``<name/>``.  A text leaf
    always gets an explicit end tag, so a leaf holding "" serializes as
    ``<name></name>`` (which, note, re-parses as an empty element).
    """
    if t.is_text:
        return f"<{t.label}>{_escape(t.text or '')}</{t.label}>"
    if not t.children:
        return f"<{t.label}/>"
    inner = "".join(serialize(c) for c in t.children)
    return f"<{t.label}>{inner}</{t.label}>"


class _Frame:
    __slots__ = ("label", "children", "chunks")

    def __init__(self, label: str) -> None:
        self.label = label
        self.children: list[XmlTree] = []
        self.chunks: list[str] = []


def parse_document(text: str) -> XmlTree:
    """Parse one document of the supported subset into a tree with fresh ids.

    Accepted content is elements and character data only.  Attributes,
    namespaces, comments, processing instructions, doctypes, CDATA sections
    and mixed content (text sibling to elements) raise UnsupportedFeature.
    Whitespace-only text inside an element that has child elements is
    discarded, so pretty-printed input compares equal to compact input;
    text inside a leaf element is preserved verbatim.
    """
    stack: list[_Frame] = []
    root: list[XmlTree] = []

    def start(name: str, attrs: dict) -> None:
        if attrs:
            raise UnsupportedFeature(f"attributes are not supported (element {name!r})")
        if ":" in name:
            raise UnsupportedFeature(f"namespaces are not supported (element {name!r})")
        stack.append(_Frame(name))

    def end(name: str) -> None:
        frame = stack.pop()
        if frame.children:
            if any(chunk.strip() for chunk in frame.chunks):
                raise UnsupportedFeature(
                    f"mixed content under element {frame.label!r}"
                )
            node = XmlTree(frame.label, children=frame.children)
        elif frame.chunks:
            node = XmlTree(frame.label, text="".join(frame.chunks))
        else:
            node = XmlTree(frame.label, children=[])
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)

    def chars(data: str) -> None:
        if stack:
            stack[-1].chunks.append(data)
        elif data.strip():
            raise MalformedXml("character data outside the root element")

    def reject(kind: str):
        def handler(*_args) -> None:
            raise UnsupportedFeature(f"{kind} are not supported")

        return handler

    parser = expat.ParserCreate()
    parser.buffer_text = True
    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.CommentHandler = reject("comments")
    parser.ProcessingInstructionHandler = reject("processing instructions")
    parser.StartCdataSectionHandler = reject("CDATA sections")
    parser.StartDoctypeDeclHandler = reject("doctype declarations")
    parser.EntityDeclHandler = reject("entity declarations")

    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise MalformedXml(str(exc)) from None
    if not root:
        raise MalformedXml("no root element")
    return root[0]


# ----------------------------------------------------------------------
# Document stores

class DocumentStore:
    """A named collection of parsed documents.

    Node identifiers are unique across the store and across any view
    instance evaluated from it.  All read operations are safe under shared
    concurrent reads; edit application requires exclusive access.
    """

    def __init__(self) -> None:
        self.docs: dict[str, XmlTree] = {}

    def add(self, name: str, tree: XmlTree) -> None:
        if name in self.docs:
            raise ValueError(f"document {name!r} already bound")
        self.docs[name] = tree

    def get(self, name: str) -> XmlTree:
        try:
            return self.docs[name]
        except KeyError:
            raise UnknownDocument(f"no document bound to {name!r}") from None

    def copy(self) -> "DocumentStore":
        """Identifier-preserving deep copy, for pre-edit snapshots."""
        out = DocumentStore()
        for name, tree in self.docs.items():
            out.docs[name] = copy_tree(tree, preserve_ids=True)
        return out

    def find_node(self, node_id: int) -> Optional[XmlTree]:
        for tree in self.docs.values():
            for node in iter_nodes(tree):
                if node.node_id == node_id:
                    return node
        return None

    def parent_index(self) -> dict[int, XmlTree]:
        idx: dict[int, XmlTree] = {}
        for tree in self.docs.values():
            idx.update(parent_index(tree))
        return idx
