"""Tree model: parsing, serialization, value equality, location, paths."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xview.errors import (
    MalformedXml,
    NonDistinctPathNames,
    UnknownDocument,
    UnsupportedFeature,
)
from xview.xml_model import (
    DocRoot,
    DocumentStore,
    Path,
    QualifiedPath,
    XmlTree,
    copy_tree,
    element,
    is_prefix,
    iter_nodes,
    last_name,
    locate,
    parse_document,
    serialize,
    string_value,
    text_leaf,
    value_equal,
)
from .conftest import D1_XML


def test_parse_nested_document():
    t = parse_document("<root><A><B>1</B></A><A><B>2</B></A></root>")
    expected = element(
        "root",
        [element("A", [text_leaf("B", "1")]), element("A", [text_leaf("B", "2")])],
    )
    assert value_equal(t, expected)


def test_parse_empty_element_has_zero_children():
    t = parse_document("<r></r>")
    assert not t.is_text
    assert t.children == []
    assert value_equal(t, parse_document("<r/>"))


def test_parse_rejects_attributes():
    with pytest.raises(UnsupportedFeature):
        parse_document('<a x="1"/>')


@pytest.mark.parametrize(
    "text",
    [
        "<a><!-- hidden --></a>",
        "<a><?pi data?></a>",
        "<a><![CDATA[x]]></a>",
        '<!DOCTYPE a SYSTEM "a.dtd"><a/>',
        "<ns:a>1</ns:a>",
        "<a>text<b>1</b></a>",
    ],
)
def test_parse_rejects_unsupported_constructs(text):
    with pytest.raises(UnsupportedFeature):
        parse_document(text)


@pytest.mark.parametrize("text", ["<a><b></a>", "<a>", "no markup", "<a/><b/>"])
def test_parse_rejects_malformed(text):
    with pytest.raises(MalformedXml):
        parse_document(text)


def test_parse_discards_whitespace_between_elements():
    pretty = "<r>\n  <A>\n    <B>b1</B>\n  </A>\n</r>"
    assert value_equal(parse_document(pretty), parse_document("<r><A><B>b1</B></A></r>"))


def test_parse_preserves_leaf_text_verbatim():
    t = parse_document("<a>  spaced  </a>")
    assert t.text == "  spaced  "


def test_serialize_simple():
    t = element("r", [element("A", [text_leaf("B", "1")])])
    assert serialize(t) == "<r><A><B>1</B></A></r>"


def test_serialize_empty_element_is_self_closing():
    assert serialize(element("r")) == "<r/>"


def test_serialize_escapes_markup_characters():
    t = text_leaf("a", 'x < y & "z" > w')
    assert value_equal(parse_document(serialize(t)), t)


def test_d1_round_trip():
    t = parse_document(D1_XML)
    assert value_equal(parse_document(serialize(t)), t)


def test_value_equal_ignores_ids():
    a = element("A", [text_leaf("B", "1")])
    b = element("A", [text_leaf("B", "1")])
    assert a.node_id != b.node_id
    assert value_equal(a, b)


def test_value_equal_is_order_sensitive():
    a = element("A", [text_leaf("B", "1"), text_leaf("C", "2")])
    b = element("A", [text_leaf("C", "2"), text_leaf("B", "1")])
    assert not value_equal(a, b)


def test_value_equal_distinguishes_labels():
    assert not value_equal(text_leaf("D", "1"), text_leaf("H", "1"))
    # while their string values agree
    assert string_value(text_leaf("D", "1")) == string_value(text_leaf("H", "1"))


def test_empty_children_distinct_from_empty_text():
    assert not value_equal(element("a"), text_leaf("a", ""))


def test_locate_multi_match_in_document_order(d1_store):
    a = d1_store.get("r").children[0]
    cs = locate(a, ("C",))
    assert [string_value(c) for c in cs] == ["1g1", "2"]
    ds = locate(a, ("C", "D"))
    assert [d.text for d in ds] == ["1", "2"]
    assert locate(a, ("nothing",)) == []


def test_locate_results_have_distinct_ids(d1_store):
    a = d1_store.get("r").children[0]
    found = locate(a, ("C",))
    assert len({n.node_id for n in found}) == len(found)


def test_string_value(d1_store):
    a = d1_store.get("r").children[0]
    h = locate(a, ("H",))[0]
    assert string_value(h) == "1"
    c1 = locate(a, ("C",))[0]
    assert string_value(c1) == "1g1"
    assert string_value(element("x", [element("y")])) == ""


def test_last_name():
    assert last_name(Path(("F", "G"))) == "G"
    assert last_name(Path(("B",))) == "B"
    assert last_name(Path(("C", "F"))) == "F"


def test_path_rejects_repeated_names():
    with pytest.raises(NonDistinctPathNames):
        Path(("A", "B", "A"))
    with pytest.raises(NonDistinctPathNames):
        Path(())


def test_is_prefix():
    root = DocRoot("r")
    assert is_prefix(
        QualifiedPath(root, ("r", "A", "C")), QualifiedPath(root, ("r", "A", "C", "D"))
    )
    assert not is_prefix(
        QualifiedPath(root, ("r", "A", "B")), QualifiedPath(root, ("r", "A", "C"))
    )
    p = QualifiedPath(root, ("r", "A"))
    assert is_prefix(p, p)
    assert not is_prefix(QualifiedPath(DocRoot("other"), ("r",)), p)


def test_store_unknown_document():
    store = DocumentStore()
    with pytest.raises(UnknownDocument):
        store.get("nope")
    store.add("d", parse_document("<d/>"))
    with pytest.raises(ValueError):
        store.add("d", parse_document("<d/>"))


# ----------------------------------------------------------------------
# Property tests

_labels = st.sampled_from(["a", "b", "c"])
_texts = st.text(
    alphabet="xy01 <>&\"'", min_size=1, max_size=6
)

_trees = st.recursive(
    st.builds(text_leaf, _labels, _texts),
    lambda inner: st.builds(
        lambda l, cs: element(l, cs), _labels, st.lists(inner, max_size=3)
    ),
    max_leaves=10,
)

# a deliberately tiny space so that equal values actually get drawn
_small_trees = st.recursive(
    st.builds(text_leaf, st.sampled_from(["a", "b"]), st.sampled_from(["1", "2"])),
    lambda inner: st.builds(
        lambda l, cs: element(l, cs),
        st.sampled_from(["a", "b"]),
        st.lists(inner, max_size=2),
    ),
    max_leaves=4,
)


@given(_trees)
def test_prop_round_trip(t):
    assert value_equal(parse_document(serialize(t)), t)


@given(_small_trees, _small_trees, _small_trees)
def test_prop_value_equal_equivalence(a, b, c):
    assert value_equal(a, a)
    assert value_equal(a, b) == value_equal(b, a)
    if value_equal(a, b) and value_equal(b, c):
        assert value_equal(a, c)


@given(_trees)
def test_prop_copy_is_value_equal_with_disjoint_ids(t):
    copied = copy_tree(t)
    assert value_equal(copied, t)
    original_ids = {n.node_id for n in iter_nodes(t)}
    copied_ids = {n.node_id for n in iter_nodes(copied)}
    assert not original_ids & copied_ids


@given(_trees)
def test_prop_locate_order_and_distinctness(t):
    order = {n.node_id: i for i, n in enumerate(iter_nodes(t))}
    for names in [("a",), ("b",), ("a", "b"), ("b", "a", "c")]:
        found = locate(t, names)
        positions = [order[n.node_id] for n in found]
        assert positions == sorted(positions)
        assert len(set(positions)) == len(positions)
