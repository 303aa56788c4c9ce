"""Conjugacy classes, element counts and fixed point ratios.

Classes are discovered from random elements closed under power maps, and the
list is certified complete once the class sizes sum to ``|G|``.  Records are
pairwise non-conjugate by construction: a new record is only created after a
backtrack conjugacy test against every earlier record with the same cheap
invariants has failed.
"""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from string import ascii_uppercase

from sympy import primefactors

from .backtrack import centralizer, conjugating_element
from .errors import InputError, InternalError, ResourceError, StateError
from .group import GroupHandle, coset_action

CLASS_ORDER_BUDGET = 10**12
CLASS_DEGREE_BUDGET = 2000


@dataclass
class ConjClassRecord:
    representative: object
    element_order: int
    class_size: int
    centralizer_order: int
    fixed_point_count: int
    label: str = ""
    centralizer: GroupHandle | None = field(default=None, repr=False, compare=False)

    @property
    def cycle_type(self):
        return self.representative.cycle_type()


@dataclass
class ClassInventory:
    group: GroupHandle
    records: list
    complete: bool
    method: str
    prime_only: bool = False

    def by_order(self, r):
        return [rec for rec in self.records if rec.element_order == r]

    def total_size(self):
        return sum(rec.class_size for rec in self.records)

    def find(self, x, seed=0):
        """The record whose class contains ``x`` (None if no record matches)."""
        key = class_invariant(x)
        for rec in self.records:
            if class_invariant(rec.representative) != key:
                continue
            if conjugating_element(self.group, x, rec.representative,
                                   centralizer_y=rec.centralizer, seed=seed) is not None:
                return rec
        return None


def class_invariant(x):
    """Conjugation-invariant key: order, cycle type and cycle types of the
    prime-index powers."""
    o = x.order()
    return (o, x.cycle_type(), tuple((p, (x ** p).cycle_type()) for p in primefactors(o)))


def _label(records):
    by = {}
    for rec in records:
        by.setdefault(rec.element_order, []).append(rec)
    for o, recs in by.items():
        for i, rec in enumerate(recs):
            suffix = ascii_uppercase[i] if i < 26 else f"_{i}"
            rec.label = f"{o}{suffix}"


def class_inventory(G, prime_only=False, seed=0, order_budget=CLASS_ORDER_BUDGET,
                    degree_budget=CLASS_DEGREE_BUDGET, max_samples=10**6):
    """All conjugacy classes of ``G`` (or only those of prime order)."""
    if G.order > order_budget or G.degree > degree_budget:
        raise ResourceError(
            f"|G| = {G.order} on {G.degree} points exceeds the class budget; "
            "import a class table instead")
    rng = random.Random(seed)
    records = []
    buckets = {}
    total = 0
    queue = [G.identity()]
    samples = 0
    while total < G.order:
        if queue:
            g = queue.pop()
        else:
            samples += 1
            if samples > max_samples:
                raise ResourceError(f"class enumeration did not finish in {max_samples} samples")
            g = G.random_element(rng)
        key = class_invariant(g)
        known = False
        for rec in buckets.get(key, ()):
            if conjugating_element(G, g, rec.representative, centralizer_y=rec.centralizer,
                                   seed=seed) is not None:
                known = True
                break
        if known:
            continue
        C = centralizer(G, g, seed=seed)
        size = G.order // C.order
        rec = ConjClassRecord(g, key[0], size, C.order, g.num_fixed(), centralizer=C)
        records.append(rec)
        buckets.setdefault(key, []).append(rec)
        total += size
        if total > G.order:
            raise InternalError("class sizes exceed the group order")
        o = key[0]
        for d in range(2, o):
            if o % d == 0:
                queue.append(g ** d)
    records.sort(key=lambda r: (r.element_order, r.class_size, r.cycle_type))
    _label(records)
    inv = ClassInventory(G, records, True, "random+power-maps, sum of class sizes = |G|")
    if prime_only:
        inv = ClassInventory(G, [r for r in records if r.element_order > 1
                                 and len(primefactors(r.element_order)) == 1
                                 and primefactors(r.element_order)[0] == r.element_order],
                             True, inv.method, prime_only=True)
    return inv


def class_size(G, x, seed=0):
    if x.degree != G.degree or not G.contains(x):
        raise InputError("element is not in the group")
    return G.order // centralizer(G, x, seed=seed).order


def count_elements_of_order(inv, r):
    """i_r: the number of elements of order exactly ``r``."""
    if not inv.complete:
        raise StateError("class inventory is not certified complete")
    if inv.prime_only and len(primefactors(r)) != 1 or (inv.prime_only and primefactors(r)[0] != r):
        raise StateError("prime-only inventory cannot count non-prime orders")
    return sum(rec.class_size for rec in inv.records if rec.element_order == r)


count_elements_of_prime_order = count_elements_of_order


def fpr_by_fixes(x, action_degree=None):
    """Proportion of points fixed by ``x``."""
    n = action_degree or x.degree
    return Fraction(x.num_fixed(), n)


def fpr_by_fusion(G, H, x, h_inventory=None, seed=0):
    """|x^G ∩ H| / |x^G| computed from the classes of H fused into G."""
    if x.is_identity():
        return Fraction(1)
    if not G.contains(x):
        raise InputError("element is not in the group")
    CG = centralizer(G, x, seed=seed)
    size = G.order // CG.order
    if h_inventory is None:
        h_inventory = class_inventory(H, prime_only=_is_prime(x.order()), seed=seed)
    meet = 0
    key = class_invariant(x)
    for rec in h_inventory.records:
        if rec.element_order != key[0]:
            continue
        if class_invariant(rec.representative) != key:
            continue
        if conjugating_element(G, rec.representative, x, centralizer_y=CG, seed=seed) is not None:
            meet += rec.class_size
    return Fraction(meet, size)


def fpr_comparison(G, H, seed=0):
    """For each prime-order class of G acting on the cosets of H: (record,
    fpr from fixed points of the coset action, fpr from class fusion)."""
    action = coset_action(G, H, seed=seed)
    inv = class_inventory(G, prime_only=True, seed=seed)
    hinv = class_inventory(H, prime_only=True, seed=seed)
    rows = []
    for rec in inv.records:
        x = rec.representative
        rows.append((rec, fpr_by_fixes(action.image(x)),
                     fpr_by_fusion(G, H, x, h_inventory=hinv, seed=seed)))
    return rows, action


def _is_prime(n):
    return n > 1 and primefactors(n) == [n]


@dataclass
class FusionEntry:
    h_label: str
    g_label: str
    h_class_size: int


def fuse_classes(G, H, g_inventory=None, h_inventory=None, seed=0):
    """Map each prime-order H-class to its G-class.

    Returns (entries, meets) where ``meets[g_label]`` is |x^G ∩ H|.
    """
    g_inventory = g_inventory or class_inventory(G, prime_only=True, seed=seed)
    h_inventory = h_inventory or class_inventory(H, prime_only=True, seed=seed)
    entries, meets = [], {}
    for rec in h_inventory.records:
        target = g_inventory.find(rec.representative, seed=seed)
        if target is None:
            raise InternalError(f"H-class {rec.label} fuses into no G-class")
        entries.append(FusionEntry(rec.label, target.label, rec.class_size))
        meets[target.label] = meets.get(target.label, 0) + rec.class_size
    return entries, meets


# --- class-table CSV -----------------------------------------------------------

TABLE_COLUMNS = ["label", "element_order", "class_size", "centralizer_order", "fixed_points"]


@dataclass
class ClassTableRow:
    label: str
    element_order: int | None
    class_size: int
    centralizer_order: int | None = None
    fixed_points: int | None = None
    fpr: Fraction | None = None
    x_cap_h: int | None = None
    degree: int | None = None

    def ratio(self):
        if self.fpr is not None:
            return self.fpr
        if self.x_cap_h is not None:
            return Fraction(self.x_cap_h, self.class_size)
        if self.fixed_points is not None and self.degree:
            return Fraction(self.fixed_points, self.degree)
        raise InputError(f"row {self.label}: needs fpr, x_cap_h or fixed_points with degree")


def export_class_table(inv):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS + ["degree"])
    for rec in inv.records:
        w.writerow([rec.label, rec.element_order, rec.class_size, rec.centralizer_order,
                    rec.fixed_point_count, inv.group.degree])
    return buf.getvalue()


def _opt_int(row, name):
    v = (row.get(name) or "").strip()
    return int(v) if v else None


def parse_class_table(text):
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    fields = {f.strip() for f in (reader.fieldnames or [])}
    if not {"label", "class_size"} <= fields:
        raise InputError("class table needs at least 'label' and 'class_size' columns")
    for lineno, raw in enumerate(reader, 2):
        row = {k.strip(): v for k, v in raw.items() if k is not None}
        try:
            size = _eval_int(row["class_size"])
            fpr = row.get("fpr", "").strip() if row.get("fpr") else ""
            rows.append(ClassTableRow(
                label=row["label"].strip(),
                element_order=_opt_int(row, "element_order"),
                class_size=size,
                centralizer_order=_opt_int(row, "centralizer_order"),
                fixed_points=_opt_int(row, "fixed_points"),
                fpr=Fraction(fpr) if fpr else None,
                x_cap_h=_eval_int(row["x_cap_h"]) if (row.get("x_cap_h") or "").strip() else None,
                degree=_opt_int(row, "degree"),
            ))
        except (ValueError, KeyError) as e:
            raise InputError(f"class table line {lineno}: {e}") from None
    return rows


def _eval_int(text):
    """Integer literal, also accepting ``2^22`` style powers."""
    text = text.strip()
    if "^" in text:
        b, e = text.split("^", 1)
        return int(b) ** int(e)
    return int(text)
