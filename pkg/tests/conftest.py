"""Shared fixtures: the small running document and the books/universities set."""

from __future__ import annotations

import pytest

from xview import DocumentStore, parse_document, parse_update, parse_view_def

# A document exercising every structural case at once: a return expression
# that matches nothing is covered by D1_NO_B below, multi-match paths by the
# two C children, and a join between sibling subtrees by D and H.
D1_XML = (
    "<r><A><B>b1</B><C><D>1</D><F><G>g1</G></F></C>"
    "<C><D>2</D></C><H>1</H></A></r>"
)

D1_NO_B_XML = "<r><A><C><D>1</D><F><G>g1</G></F></C><C><D>2</D></C><H>1</H></A></r>"

EX1_VIEW = (
    '<v>{for x in doc("r")/r/A, y in x/C, z in x/H '
    'where y/D=z and z="1" '
    "return <e>{x/B}{x/C}{y/F/G}{z}</e>}</v>"
)

# Books with authors and titles; universities with subjects that reference
# book titles.  The first book is used by two universities, the last book
# matches no subject at all (its mark element, shared with the first book,
# exists to express a deliberately over-reaching source update in tests).
BKINF_XML = (
    "<bkInf>"
    "<book><auths><aName>John</aName><aName>Mary</aName></auths>"
    "<title>IS</title><mark>1</mark></book>"
    "<book><auths><aName>Peter</aName></auths><title>DB</title></book>"
    "<book><auths><aName>Kate</aName></auths><title>AI</title></book>"
    "<book><auths><aName>Zoe</aName></auths><title>XX</title><mark>1</mark></book>"
    "</bkInf>"
)

SUBJINF_XML = (
    "<subjInf>"
    "<uni><uName>UniSA</uName><subjs>"
    "<subj><sName>InfoSys</sName><title>IS</title>"
    "<profs><pName>Paul</pName></profs></subj>"
    "<subj><sName>DataBasics</sName><title>DB</title>"
    "<profs><pName>Rose</pName></profs></subj>"
    "</subjs></uni>"
    "<uni><uName>Swinburne</uName><subjs>"
    "<subj><sName>InfoSystems</sName><title>IS</title>"
    "<profs><pName>Hugh</pName></profs></subj>"
    "<subj><sName>MachineIntel</sName><title>AI</title>"
    "<profs><pName>Iris</pName></profs></subj>"
    "</subjs></uni>"
    "</subjInf>"
)

QBK_VIEW = (
    '<Qbk>{ for x in doc("bkInf.xml")/bkInf/book, '
    'y in doc("subjInf.xml")/subjInf/uni, '
    "z in y/subjs/subj "
    "where x/title=z/title "
    "return <use>{x/auths}{x/title}{y/uName}{z/profs}</use> }</Qbk>"
)

QBK_DV = (
    "for r in view(Qbk)/Qbk/use\n"
    'where r/title="IS"\n'
    "update r/auths { insert <aName>Susan</aName> }"
)

# The source statement the translator is expected to produce, including the
# optional $ sigil on one variable reference.
QBK_DS_PRINTED = (
    'for x in doc("bkInf.xml")/bkInf/book,\n'
    '    y in doc("subjInf.xml")/subjInf/uni,\n'
    "    z in $y/subjs/subj\n"
    'where x/title=z/title and x/title="IS"\n'
    "update x/auths { insert <aName>Susan</aName> }"
)

QBK_DS_NO_COND = (
    'for x in doc("bkInf.xml")/bkInf/book, '
    'y in doc("subjInf.xml")/subjInf/uni, '
    "z in y/subjs/subj "
    "where x/title=z/title "
    "update x/auths { insert <aName>Susan</aName> }"
)

QBK_DS_PADDED = (
    'for x in doc("bkInf.xml")/bkInf/book '
    'where x/mark="1" '
    "update x/auths { insert <aName>Susan</aName> }"
)


@pytest.fixture
def d1_store() -> DocumentStore:
    store = DocumentStore()
    store.add("r", parse_document(D1_XML))
    return store


@pytest.fixture
def ex1_view():
    return parse_view_def(EX1_VIEW)


@pytest.fixture
def qbk_store() -> DocumentStore:
    store = DocumentStore()
    store.add("bkInf.xml", parse_document(BKINF_XML))
    store.add("subjInf.xml", parse_document(SUBJINF_XML))
    return store


@pytest.fixture
def qbk_view():
    return parse_view_def(QBK_VIEW)


@pytest.fixture
def qbk_dv():
    return parse_update(QBK_DV)
