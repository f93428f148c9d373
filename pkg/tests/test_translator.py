"""Path mapping, case classification, and update rewriting."""

from __future__ import annotations

import random

import pytest

from xview.errors import LevelMismatch, UnmappableName
from xview.fuzzgen import GENERATORS, random_case
from xview.lang import (
    PathEqPath,
    PathEqString,
    parse_update,
    parse_view_def,
    render_update,
)
from xview.translator import (
    Case,
    Mapping,
    ReasonCode,
    Rejected,
    Translated,
    classify,
    map_paths,
    translate,
)
from xview.updater import abstract_form
from xview.verifier import check_correctness
from xview.xml_model import DocumentStore, parse_document
from .conftest import EX1_VIEW, QBK_DS_PRINTED, QBK_DV, QBK_VIEW


def _mapping_for(view_text: str, update_text: str) -> Mapping:
    view = parse_view_def(view_text)
    return map_paths(view, abstract_form(parse_update(update_text)))


def test_map_paths_books():
    m = _mapping_for(QBK_VIEW, QBK_DV)
    assert (m.cond.var, m.cond.gamma, m.cond.theta) == ("x", ("title",), ())
    assert (m.target.var, m.target.gamma, m.target.theta) == ("x", ("auths",), ())


def test_map_paths_example_view_with_remainder():
    m = _mapping_for(
        EX1_VIEW, 'for r in v/e where r/G="g1" update r/G { delete <X>1</X> }'
    )
    assert (m.cond.var, m.cond.gamma, m.cond.theta) == ("y", ("F", "G"), ())
    m2 = _mapping_for(
        EX1_VIEW, 'for r in v/e where r/C/D="1" update r/C/F { delete <X>1</X> }'
    )
    assert (m2.cond.var, m2.cond.gamma, m2.cond.theta) == ("x", ("C",), ("D",))
    assert (m2.target.var, m2.target.gamma, m2.target.theta) == ("x", ("C",), ("F",))


def test_map_paths_unknown_name():
    view = parse_view_def(QBK_VIEW)
    ab = abstract_form(
        parse_update('for r in Qbk/use where r/nope="1" update r/auths { delete x }')
    )
    with pytest.raises(UnmappableName):
        map_paths(view, ab)


def _outcome(view_text: str, update_text: str):
    return translate(parse_view_def(view_text), parse_update(update_text))


def test_classify_books_update_is_t1():
    out = _outcome(QBK_VIEW, QBK_DV)
    assert isinstance(out, Translated) and out.case is Case.T1


def test_classify_join_case_is_t2():
    # condition maps to the bare-binding side of the join, target to the
    # other join variable's subtree
    out = _outcome(EX1_VIEW, 'for r in v/e where r/H="1" update r/G { delete P }')
    assert isinstance(out, Translated) and out.case is Case.T2


def test_classify_target_prefix_rejected():
    out = _outcome(EX1_VIEW, 'for r in v/e where r/H="1" update r/C { delete P }')
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.TargetPrefixOfWherePath
    out2 = _outcome(EX1_VIEW, 'for r in v/e where r/C/D="1" update r/H { delete P }')
    assert isinstance(out2, Rejected)
    assert out2.reason is ReasonCode.TargetPrefixOfWherePath


def test_classify_no_join_rejected():
    out = _outcome(EX1_VIEW, 'for r in v/e where r/H="1" update r/B { insert <Q>q</Q> }')
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.CondTargetDifferentVarsNoJoin


SINGLE_VAR_VIEW = '<v>{for x1 in doc("d")/R/A return <e>{x1/B}{x1/C}</e>}</v>'
BARE_BINDING_VIEW = '<q>{for x in doc("d")/R/A/C return <E>{x}</E>}</q>'
MULTI_VAR_VIEW = (
    '<v>{for x in doc("d")/R/A, y in x/C return <e>{x/B}{y/F}</e>}</v>'
)


def test_insert_at_root_ambiguous_placement():
    out = _outcome(
        BARE_BINDING_VIEW,
        'for u in q where u/E/C/W="1" update u { insert <E><C><W>2</W></C></E> }',
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.NoUniqueSourcePlacement


def test_insert_at_wrapper_violates_production():
    out = _outcome(
        BARE_BINDING_VIEW,
        'for w in q/E where w/C/W="1" update w { insert <C><W>2</W></C> }',
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.ViolatesProduction


def test_insert_at_wrapper_no_specifiable_condition():
    out = _outcome(
        SINGLE_VAR_VIEW, 'for w in v/e where w/B="1" update w { insert <C>9</C> }'
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.NoSpecifiableCondition


def test_insert_unknown_label_at_wrapper():
    out = _outcome(
        SINGLE_VAR_VIEW, 'for w in v/e where w/B="1" update w { insert <zz>9</zz> }'
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.InsertionAtWrapperOrRoot


def test_root_deletion_needs_single_return_variable():
    out = _outcome(
        MULTI_VAR_VIEW, 'for u in v where u/e/B="1" update u ( delete e )'
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.MultiVariableReturnRootDeletion


def test_wrapper_delete_tree_rejected():
    out = _outcome(
        SINGLE_VAR_VIEW,
        'for w in v/e where w/B="1" update w { delete <C>1</C> }',
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.NoUniqueSourcePlacement


def test_root_deletion_of_non_wrapper_label_rejected():
    out = _outcome(
        SINGLE_VAR_VIEW, 'for u in v where u/e/B="1" update u ( delete B )'
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.NoUniqueSourcePlacement


def test_wrapper_deletion_of_bare_binding_label_rejected():
    # removing the lone binding copy would leave wrapper trees that
    # evaluation can never produce
    out = _outcome(
        BARE_BINDING_VIEW, 'for w in q/E where w/C/W="1" update w ( delete C )'
    )
    assert isinstance(out, Rejected)
    assert out.reason is ReasonCode.ViolatesProduction


def test_translate_books_matches_expected_statement(qbk_view, qbk_dv):
    out = translate(qbk_view, qbk_dv)
    assert isinstance(out, Translated) and out.case is Case.T1
    assert out.statement == parse_update(QBK_DS_PRINTED)


def test_translate_t3_schema():
    out = _outcome(
        SINGLE_VAR_VIEW, 'for w in v/e where w/B="1" update w ( delete C )'
    )
    assert isinstance(out, Translated) and out.case is Case.T3
    expected = parse_update(
        'for x1 in doc("d")/R/A where x1/B="1" update x1/C/.. { delete C }'
    )
    assert out.statement == expected


def test_translate_t4_schema():
    out = _outcome(SINGLE_VAR_VIEW, 'for u in v where u/e/B="1" update u ( delete e )')
    assert isinstance(out, Translated) and out.case is Case.T4
    expected = parse_update(
        'for x1 in doc("d")/R/A where x1/B="1" update x1/.. { delete A }'
    )
    assert out.statement == expected


def test_translate_keeps_view_clauses_and_appends_condition():
    rng = random.Random(11)
    for _ in range(60):
        case = random_case(rng)
        out = translate(case.view, case.update)
        if not isinstance(out, Translated):
            continue
        assert out.statement.bindings == case.view.bindings
        assert out.statement.conditions[:-1] == case.view.conditions
        appended = out.statement.conditions[-1]
        assert isinstance(appended, PathEqString)
        assert appended.value == case.update.conditions[0].value


def test_translate_requires_view_level(qbk_view):
    with pytest.raises(LevelMismatch):
        translate(qbk_view, parse_update(QBK_DS_PRINTED))


def test_translated_statement_renders_and_reparses():
    rng = random.Random(21)
    for _ in range(60):
        case = random_case(rng)
        out = translate(case.view, case.update)
        if isinstance(out, Translated):
            assert parse_update(render_update(out.statement)) == out.statement


def test_classify_is_total_over_generators():
    rng = random.Random(31)
    for gen in GENERATORS:
        for _ in range(10):
            case = gen(rng)
            out = translate(case.view, case.update)
            assert isinstance(out, (Translated, Rejected))


def test_guard_bypass_produces_incorrect_translation(d1_store, ex1_view):
    # deleting below the target would invalidate the join condition the
    # where clause re-checks on evaluation; with the guard disabled the
    # translation goes through and the round trip breaks
    dv = parse_update('for w in v/e where w/C/D="1" update w/C { delete <D>1</D> }')
    guarded = translate(ex1_view, dv)
    assert isinstance(guarded, Rejected)
    assert guarded.reason is ReasonCode.TargetPrefixOfWherePath

    forced = translate(ex1_view, dv, enforce_prefix_guard=False)
    assert isinstance(forced, Translated)
    ok, diff = check_correctness(ex1_view, dv, forced.statement, d1_store)
    assert not ok and diff is not None
