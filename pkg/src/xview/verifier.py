"""Executable precision oracles for translated updates.

Correctness compares, as ordered value trees, the view evaluated after the
source update against the view instance updated directly.  Minimality is
checked by leave-one-edit-out: if dropping any single recorded edit still
yields a correct result, the translation over-updated the source.  Both
oracles are independent of the translation path they judge: they only
evaluate, apply and compare.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .evaluator import enumerate_bindings, evaluate_view, store_resolver
from .lang import DeleteBinding, UpdateStatement, ViewDef
from .translator import Case, Mapping, map_paths
from .updater import (
    Deleted,
    Edit,
    abstract_form,
    apply_update,
    edit_to_json,
    plan_update,
    replay_edits,
)
from .xml_model import (
    DocumentStore,
    XmlTree,
    locate,
    serialize,
    string_value,
    value_equal,
)


@dataclass
class VerificationReport:
    correct: bool
    view_diff: Optional[dict] = None
    minimal: bool = False
    witness: Optional[Edit] = None
    lemma_checks: list[tuple[str, bool]] = field(default_factory=list)

    @property
    def precise(self) -> bool:
        return self.correct and self.minimal

    def to_json(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = json.loads(edit_to_json(self.witness))
        return {
            "correct": self.correct,
            "minimal": self.minimal,
            "diff": self.view_diff,
            "witness": witness,
            "lemmas": {name: ok for name, ok in self.lemma_checks},
        }


def verify_translation(
    view: ViewDef,
    view_update: UpdateStatement,
    source_update: UpdateStatement,
    store: DocumentStore,
    case: Optional[Case] = None,
) -> VerificationReport:
    """Run both oracles (and, when the case is known, the lemma suite)."""
    correct, diff = check_correctness(view, view_update, source_update, store)
    minimal, witness = False, None
    if correct:
        minimal, witness = check_minimality(view, view_update, source_update, store)
    lemmas: list[tuple[str, bool]] = []
    if case is not None and correct:
        lemmas = run_lemma_suite(view, view_update, source_update, store, case)
    return VerificationReport(correct, diff, minimal, witness, lemmas)


def tree_diff(a: XmlTree, b: XmlTree, path: str = "") -> Optional[dict]:
    """First divergence between two trees, or None when value-equal."""
    here = path + a.label
    if a.label != b.label or a.is_text != b.is_text:
        return {"path": here, "left": serialize(a), "right": serialize(b)}
    if a.is_text:
        if a.text != b.text:
            return {"path": here, "left": serialize(a), "right": serialize(b)}
        return None
    ac, bc = a.children or [], b.children or []
    if len(ac) != len(bc):
        return {"path": here, "left": serialize(a), "right": serialize(b)}
    for i, (x, y) in enumerate(zip(ac, bc)):
        d = tree_diff(x, y, f"{here}[{i}]/")
        if d is not None:
            return d
    return None


def check_correctness(
    view: ViewDef,
    view_update: UpdateStatement,
    source_update: UpdateStatement,
    store: DocumentStore,
) -> tuple[bool, Optional[dict]]:
    """Evaluate both routes and compare the resulting instances.

    Route A applies the source update to a copy of the store and evaluates
    the view; route B evaluates the view and applies the view update to the
    instance.  Equality is ordered and value-based.
    """
    updated = store.copy()
    apply_update(source_update, updated)
    via_source = evaluate_view(view, updated)

    via_view = evaluate_view(view, store)
    apply_update(view_update, via_view)

    diff = tree_diff(via_source.tree, via_view.tree)
    return diff is None, diff


def check_minimality(
    view: ViewDef,
    view_update: UpdateStatement,
    source_update: UpdateStatement,
    store: DocumentStore,
) -> tuple[bool, Optional[Edit]]:
    """Leave-one-edit-out search for a smaller correct translation.

    For every edit in the source update's log, replay the log without it
    on a fresh copy of the store; if the view still matches the directly
    updated instance, that edit was unnecessary and is returned as the
    witness.  An empty log is trivially minimal.
    """
    probe = store.copy()
    log = apply_update(source_update, probe)

    expected = evaluate_view(view, store)
    apply_update(view_update, expected)

    for dropped in range(len(log)):
        variant = store.copy()
        replay_edits(log[:dropped] + log[dropped + 1 :], variant)
        instance = evaluate_view(view, variant)
        if value_equal(instance.tree, expected.tree):
            return False, log[dropped]
    return True, None


# ----------------------------------------------------------------------
# Lemma suite

def run_lemma_suite(
    view: ViewDef,
    view_update: UpdateStatement,
    source_update: UpdateStatement,
    store: DocumentStore,
    case: Case,
) -> list[tuple[str, bool]]:
    """Concrete per-instance assertions behind the translation proofs.

    L1: within one for-clause tuple, either every target-path tree receives
        the planned action or none does.
    L2: applying the source update does not change which tuples satisfy the
        view condition (root deletions excepted, where the removed bindings
        account exactly for the missing wrapper trees).
    L3: per satisfying tuple and its wrapper tree, the source-side condition
        trees satisfy the update condition exactly when the view-side ones do.
    L4: the trees at the update's target view path agree, as ordered value
        trees, between the two update routes.
    """
    abstract = abstract_form(view_update)
    mapping = map_paths(view, abstract)

    results = [
        ("L1", _lemma1(source_update, store, case)),
        ("L2", _lemma2(view, source_update, store, case)),
        ("L3", _lemma3(view, abstract, mapping, store)),
        ("L4", _lemma4(view, view_update, source_update, store, abstract)),
    ]
    return results


def _lemma1(source_update: UpdateStatement, store: DocumentStore, case: Case) -> bool:
    plan = plan_update(source_update, store.copy())
    touched = set()
    for op in plan:
        touched.add(op.child.node_id if op.kind == "delete_node" else op.node.node_id)

    tuples = enumerate_bindings(source_update.bindings, store_resolver(store))
    for tup in tuples:
        if isinstance(source_update.action, DeleteBinding):
            ids = {tup[source_update.action.var].node_id}
        else:
            ids = {
                n.node_id
                for n in locate(
                    tup[source_update.target.var], source_update.target.path
                )
            }
        hit = ids & touched
        if hit and hit != ids:
            return False
    return True


def _lemma2(
    view: ViewDef, source_update: UpdateStatement, store: DocumentStore, case: Case
) -> bool:
    before = evaluate_view(view, store)
    updated = store.copy()
    log = apply_update(source_update, updated)
    after = evaluate_view(view, updated)
    if case is Case.T4:
        removed = sum(1 for e in log if isinstance(e, Deleted))
        return len(after.tuples) == len(before.tuples) - removed
    return len(after.tuples) == len(before.tuples)


def _lemma3(
    view: ViewDef, abstract, mapping: Mapping, store: DocumentStore
) -> bool:
    instance = evaluate_view(view, store)
    cond = mapping.cond
    view_steps = abstract.cond_path.steps[2:]  # relative to the wrapper node
    for idx, tup in enumerate(instance.tuples):
        src_hit = any(
            string_value(n) == abstract.cond_value
            for n in locate(tup[cond.var], cond.gamma + cond.theta)
        )
        etree_id = instance.provenance.etree_ids[idx]
        etree = next(
            c for c in instance.tree.children or [] if c.node_id == etree_id
        )
        view_hit = any(
            string_value(n) == abstract.cond_value
            for n in locate(etree, view_steps)
        )
        if src_hit != view_hit:
            return False
    return True


def _lemma4(
    view: ViewDef,
    view_update: UpdateStatement,
    source_update: UpdateStatement,
    store: DocumentStore,
    abstract,
) -> bool:
    updated = store.copy()
    apply_update(source_update, updated)
    via_source = evaluate_view(view, updated)

    via_view = evaluate_view(view, store)
    apply_update(view_update, via_view)

    rel = abstract.target_path.steps[1:]  # relative to the view root
    left = locate(via_source.tree, rel)
    right = locate(via_view.tree, rel)
    if len(left) != len(right):
        return False
    return all(value_equal(a, b) for a, b in zip(left, right))
