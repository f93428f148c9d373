"""Apply update statements to document stores and view instances.

Application is two-phase: a planning pass enumerates the statement's
for-clause against the pre-edit state, evaluates conditions, resolves
target nodes and collapses duplicate (node, action) applications so that
only the first takes effect; an execution pass then mutates the target and
produces an edit log.  Conditions therefore always see the pre-state, and
re-applying the same planned action to a node is a no-op by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from .errors import LevelMismatch, RootLabelMismatch, TargetIsRoot, TargetNotElement
from .evaluator import (
    ViewInstance,
    enumerate_bindings,
    eval_condition,
    store_resolver,
)
from .lang import (
    DeleteBinding,
    DeleteLabel,
    DeleteTree,
    InsertTree,
    PathEqString,
    UpdateStatement,
    normalize_path,
)
from .xml_model import (
    DocumentStore,
    QualifiedPath,
    XmlTree,
    copy_tree,
    locate,
    parent_index,
    serialize,
    string_value,
    value_equal,
)


# ----------------------------------------------------------------------
# Abstract form

@dataclass(frozen=True)
class AbstractUpdate:
    """An update reduced to full paths: context, condition, target, action.

    ``common_prefix`` is the maximal common front part of the full
    condition and target paths; it identifies the context under which
    condition and target trees pair up.
    """

    common_prefix: QualifiedPath
    cond_path: QualifiedPath
    cond_value: str
    target_path: QualifiedPath
    target_parent_step: bool
    action: object


def abstract_form(stmt: UpdateStatement) -> AbstractUpdate:
    """Expand the statement's condition and target paths through its bindings.

    The condition slot takes the statement's string-equality atom (for
    source-level statements, the last one: translated statements append
    their atom to the end of the where clause).
    """
    string_atoms = [a for a in stmt.conditions if isinstance(a, PathEqString)]
    if not string_atoms:
        raise LevelMismatch("the statement has no string-equality condition")
    atom = string_atoms[-1]
    cond_path = normalize_path(stmt, atom.lhs[0], atom.lhs[1])
    target_path = normalize_path(stmt, stmt.target.var, stmt.target.path)
    common = 0
    if cond_path.root == target_path.root:
        for a, b in zip(cond_path.steps, target_path.steps):
            if a != b:
                break
            common += 1
    prefix = QualifiedPath(target_path.root, target_path.steps[:common])
    return AbstractUpdate(
        prefix, cond_path, atom.value, target_path, stmt.target.parent_step, stmt.action
    )


# ----------------------------------------------------------------------
# Edits

@dataclass(frozen=True)
class Inserted:
    parent_id: int
    tree: XmlTree  # value copy of the inserted payload


@dataclass(frozen=True)
class Deleted:
    parent_id: int
    node_id: int
    tree: XmlTree  # value copy of the removed subtree


Edit = Union[Inserted, Deleted]


def edit_to_json(edit: Edit) -> str:
    """One edit as a JSON line: {"op": ..., "parent": ..., "tree": ...}."""
    op = "insert" if isinstance(edit, Inserted) else "delete"
    return json.dumps(
        {"op": op, "parent": edit.parent_id, "tree": serialize(edit.tree)},
        sort_keys=True,
    )


# ----------------------------------------------------------------------
# Planning

@dataclass
class PlannedOp:
    """One collapsed application of the statement's action to one node.

    ``kind`` is "insert", "delete_tree" or "delete_label" with ``node`` the
    target element, or "delete_node" with ``node`` the parent and ``child``
    the specific tree being removed (binding deletion and the localized
    wrapper deletion both reduce to it).
    """

    kind: str
    node: XmlTree
    payload: Optional[XmlTree] = None
    label: Optional[str] = None
    child: Optional[XmlTree] = None


def _op_key(op: PlannedOp) -> tuple:
    if op.kind == "insert":
        return (op.node.node_id, "insert", serialize(op.payload))
    if op.kind == "delete_tree":
        return (op.node.node_id, "delete_tree", serialize(op.payload))
    if op.kind == "delete_label":
        return (op.node.node_id, "delete_label", op.label)
    return (op.child.node_id, "delete_node")


def _target_roots(stmt: UpdateStatement, target) -> list[XmlTree]:
    if stmt.level == "source":
        if not isinstance(target, DocumentStore):
            raise LevelMismatch("a source-level update applies to a DocumentStore")
        return list(target.docs.values())
    if not isinstance(target, ViewInstance):
        raise LevelMismatch("a view-level update applies to a ViewInstance")
    return [target.tree]


def _parent_index(roots: list[XmlTree]) -> dict[int, XmlTree]:
    idx: dict[int, XmlTree] = {}
    for root in roots:
        idx.update(parent_index(root))
    return idx


def _add_node_action(add, node: XmlTree, action) -> None:
    if isinstance(action, InsertTree):
        add(PlannedOp("insert", node, payload=action.tree))
    elif isinstance(action, DeleteTree):
        add(PlannedOp("delete_tree", node, payload=action.tree))
    elif isinstance(action, DeleteLabel):
        add(PlannedOp("delete_label", node, label=action.label))
    else:
        raise TypeError(f"cannot plan {action!r} here")


def _plan_view_update(stmt: UpdateStatement, instance: ViewInstance, add) -> None:
    """Pair condition and target under the common front part of their paths.

    Under each node located by the shared prefix: if some subtree at the
    condition remainder satisfies the equality, the action applies to every
    subtree at the target remainder.  One exception, forced by the source
    translation of root-level wrapper deletion: when the deleted label is
    the very step the condition path descends through, the condition
    localizes to each deleted child (deleting every wrapper tree as soon as
    one matched would not survive re-evaluation of the translated update).
    """
    ab = abstract_form(stmt)
    root = instance.tree
    if root.label != ab.target_path.steps[0]:
        raise RootLabelMismatch(
            f"view instance has root {root.label!r}, "
            f"statement addresses {ab.target_path.steps[0]!r}"
        )

    action = stmt.action
    cond_steps = ab.cond_path.steps
    tgt_steps = ab.target_path.steps
    if (
        isinstance(action, DeleteLabel)
        and len(tgt_steps) == 1
        and len(cond_steps) > 1
        and cond_steps[1] == action.label
    ):
        rest = cond_steps[2:]
        for child in list(root.children or []):
            if child.label != action.label:
                continue
            if any(string_value(n) == ab.cond_value for n in locate(child, rest)):
                add(PlannedOp("delete_node", root, child=child))
        return

    prefix = ab.common_prefix.steps
    cond_rest = cond_steps[len(prefix):]
    tgt_rest = tgt_steps[len(prefix):]
    for ctx in locate(root, prefix[1:]):
        if any(string_value(n) == ab.cond_value for n in locate(ctx, cond_rest)):
            for node in locate(ctx, tgt_rest):
                _add_node_action(add, node, action)


def _plan_source_update(
    stmt: UpdateStatement, store: DocumentStore, roots: list[XmlTree], add
) -> None:
    """Per condition-satisfying for-clause tuple, act on every target tree."""
    tuples = enumerate_bindings(stmt.bindings, store_resolver(store))
    parents: Optional[dict[int, XmlTree]] = None
    for tup in tuples:
        if not eval_condition(stmt.conditions, tup):
            continue
        action = stmt.action
        if isinstance(action, DeleteBinding):
            bound = tup[action.var]
            if parents is None:
                parents = _parent_index(roots)
            parent = parents.get(bound.node_id)
            if parent is None:
                raise TargetIsRoot(
                    f"binding {action.var!r} is a root and cannot be deleted"
                )
            add(PlannedOp("delete_node", parent, child=bound))
            continue
        nodes = locate(tup[stmt.target.var], stmt.target.path)
        if stmt.target.parent_step:
            if parents is None:
                parents = _parent_index(roots)
            seen: list[XmlTree] = []
            for n in nodes:
                parent = parents.get(n.node_id)
                if parent is None:
                    raise TargetIsRoot("the parent step would leave the document")
                if all(p.node_id != parent.node_id for p in seen):
                    seen.append(parent)
            nodes = seen
        for node in nodes:
            _add_node_action(add, node, action)


def plan_update(stmt: UpdateStatement, target) -> list[PlannedOp]:
    """Plan all applications against the pre-edit state, first one per key."""
    roots = _target_roots(stmt, target)
    plan: dict[tuple, PlannedOp] = {}

    def add(op: PlannedOp) -> None:
        plan.setdefault(_op_key(op), op)

    if stmt.level == "view":
        _plan_view_update(stmt, target, add)
    else:
        _plan_source_update(stmt, target, roots, add)
    return list(plan.values())


# ----------------------------------------------------------------------
# Execution

def apply_action(node: XmlTree, action) -> list[Edit]:
    """Apply one action to one element node, returning the edits made.

    Insertion appends a fresh-id copy of the payload as the last child.
    Tree deletion removes every child value-equal to the payload; label
    deletion removes every child bearing the label.  Deletions that match
    nothing return no edits.
    """
    if isinstance(action, InsertTree):
        if node.is_text:
            raise TargetNotElement(
                f"cannot insert under text leaf {node.label!r}"
            )
        node.children = list(node.children or [])
        node.children.append(copy_tree(action.tree))
        return [Inserted(node.node_id, copy_tree(action.tree))]
    if isinstance(action, DeleteTree):
        return _delete_children(node, lambda c: value_equal(c, action.tree))
    if isinstance(action, DeleteLabel):
        return _delete_children(node, lambda c: c.label == action.label)
    raise TypeError(f"apply_action cannot handle {action!r}")


def _delete_children(node: XmlTree, pred) -> list[Edit]:
    if node.is_text:
        return []
    keep, edits = [], []
    for child in node.children or []:
        if pred(child):
            edits.append(Deleted(node.node_id, child.node_id, copy_tree(child)))
        else:
            keep.append(child)
    node.children = keep
    return edits


def execute_plan(plan: list[PlannedOp]) -> list[Edit]:
    edits: list[Edit] = []
    for op in plan:
        if op.kind == "insert":
            edits.extend(apply_action(op.node, InsertTree(op.payload)))
        elif op.kind == "delete_tree":
            edits.extend(apply_action(op.node, DeleteTree(op.payload)))
        elif op.kind == "delete_label":
            edits.extend(apply_action(op.node, DeleteLabel(op.label)))
        else:  # delete_node
            parent = op.node
            parent.children = [
                c for c in parent.children or [] if c.node_id != op.child.node_id
            ]
            edits.append(
                Deleted(parent.node_id, op.child.node_id, copy_tree(op.child))
            )
    return edits


def apply_update(stmt: UpdateStatement, target) -> list[Edit]:
    """Apply a statement to a DocumentStore or ViewInstance, mutating it.

    Per context tuple: if some condition tree satisfies the where clause,
    the action is applied to every tree at the target path under that
    context.  Duplicate (node, action) applications collapse to the first.
    An unsatisfiable condition leaves the target unchanged and the log
    empty.
    """
    return execute_plan(plan_update(stmt, target))


def replay_edits(edits: list[Edit], store: DocumentStore) -> None:
    """Re-apply a recorded edit log to an id-preserving copy of the store."""
    for edit in edits:
        parent = store.find_node(edit.parent_id)
        if parent is None:
            raise TargetIsRoot(f"edit parent {edit.parent_id} not found in store")
        if isinstance(edit, Inserted):
            parent.children = list(parent.children or [])
            parent.children.append(copy_tree(edit.tree))
        else:
            parent.children = [
                c for c in parent.children or [] if c.node_id != edit.node_id
            ]
