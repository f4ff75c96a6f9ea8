"""Difference families in cyclic subgroups of GF(q)^* and their development."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .design import Design, Embedding, Resolution, verify_resolution
from .errors import InvalidFamily, ModeMismatch, UnknownFamilyName
from .field import FieldSpec, FieldTable, UnityRoots, build_field, default_field, roots_of_unity


class DevelopmentMode(enum.Enum):
    CYCLIC_V1 = "cyclic-v1"
    CYCLIC_VK = "cyclic-vk"
    ONE_ROTATIONAL = "one-rotational"


@dataclass(frozen=True)
class DifferenceFamily:
    """Base blocks inside G = R_{q,m}, stored as exponents of G's generator."""

    group: UnityRoots
    forbidden: UnityRoots
    k: int
    lam: int
    base_blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.group.field != self.forbidden.field or self.group.n % self.forbidden.n:
            raise InvalidFamily("forbidden subgroup is not a subgroup of the group")
        if self.forbidden.n not in (1, self.k, self.k - 1):
            raise InvalidFamily(f"|H| = {self.forbidden.n} not in {{1, k, k-1}}")
        blocks = tuple(tuple(e % self.group.n for e in b) for b in self.base_blocks)
        for b in blocks:
            if len(b) != self.k or len(set(b)) != self.k:
                raise InvalidFamily(f"base block {b} does not have {self.k} distinct elements")
        object.__setattr__(self, "base_blocks", blocks)

    @property
    def field(self) -> FieldTable:
        return self.group.field

    def block_codes(self) -> list[tuple[int, ...]]:
        return [tuple(self.group.power(e) for e in b) for b in self.base_blocks]

    def shifted(self, t: int) -> "DifferenceFamily":
        """Every base block multiplied by g^t."""
        return DifferenceFamily(self.group, self.forbidden, self.k, self.lam,
                                tuple(tuple(e + t for e in b) for b in self.base_blocks))

    def to_json(self) -> dict:
        return {"field": self.field.spec.to_json(), "group_order": self.group.n,
                "forbidden_order": self.forbidden.n, "k": self.k, "lambda": self.lam,
                "base_blocks": [list(b) for b in self.base_blocks]}

    @classmethod
    def from_json(cls, data: dict) -> "DifferenceFamily":
        f = build_field(FieldSpec.from_json(data["field"]))
        return cls(roots_of_unity(f, data["group_order"]),
                   roots_of_unity(f, data["forbidden_order"]),
                   data["k"], data.get("lambda", 1),
                   tuple(tuple(b) for b in data["base_blocks"]))


def differences(f: DifferenceFamily) -> Counter:
    """The multiset of ratios x*y^-1 over ordered pairs inside each base block."""
    n = f.group.n
    out: Counter = Counter()
    for b in f.base_blocks:
        for x in b:
            for y in b:
                if x != y:
                    out[f.group.power((x - y) % n)] += 1
    return out


def validate_df(f: DifferenceFamily) -> tuple[bool, dict[int, int]]:
    """(ok, defect) where defect maps elements to observed minus expected multiplicity."""
    delta = differences(f)
    want = Counter({g: f.lam for g in f.group.elements if g not in f.forbidden})
    defect = {}
    for g in set(delta) | set(want):
        diff = delta[g] - want[g]
        if diff:
            defect[g] = diff
    return not defect, defect


def _check_mode(f: DifferenceFamily, mode: DevelopmentMode) -> None:
    m, k, h = f.group.n, f.k, f.forbidden.n
    need_h = {DevelopmentMode.CYCLIC_V1: 1, DevelopmentMode.CYCLIC_VK: k,
              DevelopmentMode.ONE_ROTATIONAL: k - 1}[mode]
    if h != need_h:
        raise ModeMismatch(f"{mode.value} needs |H| = {need_h}, got {h}")
    if f.lam == 1:
        residue = {DevelopmentMode.CYCLIC_V1: 1, DevelopmentMode.CYCLIC_VK: k,
                   DevelopmentMode.ONE_ROTATIONAL: k - 1}[mode] % (k * (k - 1))
        if m % (k * (k - 1)) != residue:
            raise ModeMismatch(f"|G| = {m} is not {residue} mod {k * (k - 1)} for {mode.value}")


def develop(f: DifferenceFamily, mode: DevelopmentMode, check: bool = True) -> Design:
    """All G-translates of the base blocks plus the short orbit of the mode.

    Block order: family order, then translates by g^0, g^1, ...; coset blocks
    g^h*H (plus the field zero when one-rotational) come last, h ascending.
    With ``check=False`` the raw multiset of blocks is returned even for
    invalid families, which is what the coverage-equivalence tests need.
    """
    if check:
        _check_mode(f, mode)
        ok, defect = validate_df(f)
        if not ok:
            raise InvalidFamily(f"differences miss or repeat {len(defect)} elements")
    elif f.forbidden.n != {DevelopmentMode.CYCLIC_V1: 1, DevelopmentMode.CYCLIC_VK: f.k,
                           DevelopmentMode.ONE_ROTATIONAL: f.k - 1}[mode]:
        raise ModeMismatch(f"|H| = {f.forbidden.n} does not fit {mode.value}")
    G, H = f.group, f.forbidden
    blocks = []
    for b in f.base_blocks:
        for t in range(G.n):
            blocks.append(tuple(G.power(e + t) for e in b))
    step = G.n // H.n
    if mode is DevelopmentMode.CYCLIC_VK:
        for h in range(step):
            blocks.append(tuple(G.power(h + step * i) for i in range(H.n)))
    elif mode is DevelopmentMode.ONE_ROTATIONAL:
        for h in range(step):
            blocks.append(tuple(G.power(h + step * i) for i in range(H.n)) + (0,))
    points = sorted(G.elements) + ([0] if mode is DevelopmentMode.ONE_ROTATIONAL else [])
    if check and len({frozenset(b) for b in blocks}) != len(blocks):
        raise InvalidFamily("translates of the base blocks collide")
    emb = Embedding(f.field, {c: c for c in points})
    return Design.make(sorted(points), blocks, f.k, f.lam, emb)


# -- the families constructed in the literature this package reproduces ----------

_FAMILY_52 = ((1, 12, 16, 39), (3, 4, 13, 48), (6, 8, 26, 45), (7, 10, 15, 36))

_FAMILIES_121 = {
    1: ((0, 1, 5, 69), (0, 2, 46, 74)),
    2: ((0, 1, 21, 55), (0, 4, 79, 95)),
    3: ((0, 1, 52, 93), (0, 4, 15, 78)),
    4: ((0, 1, 65, 78), (0, 2, 25, 116)),
}

FAMILY_NAMES = ("52-4-1",) + tuple(f"121-4-1-{i}" for i in range(1, 5))


def paper_family(name: str) -> DifferenceFamily:
    if name == "52-4-1":
        field = default_field(2, 8)
        return DifferenceFamily(roots_of_unity(field, 51), roots_of_unity(field, 3),
                                4, 1, _FAMILY_52)
    if name.startswith("121-4-1-") and name[-1] in "1234" and len(name) == 9:
        a, b = _FAMILIES_121[int(name[-1])]
        field = default_field(3, 5)
        # Frobenius images A^(3^j), B^(3^j), 0 <= j <= 4: exponents times 3^j
        blocks = []
        for j in range(5):
            blocks.append(tuple(e * 3**j for e in a))
            blocks.append(tuple(e * 3**j for e in b))
        return DifferenceFamily(roots_of_unity(field, 121), roots_of_unity(field, 1),
                                4, 1, tuple(blocks))
    raise UnknownFamilyName(f"unknown family {name!r}; known: {', '.join(FAMILY_NAMES)}")


def paper_mode(name: str) -> DevelopmentMode:
    paper_family(name)
    return DevelopmentMode.ONE_ROTATIONAL if name == "52-4-1" else DevelopmentMode.CYCLIC_V1


def resolution_52() -> Resolution:
    """Classes g^h * P0 (0 <= h <= 16) of the developed 52-4-1 design.

    P0 holds g^(17i) B_j for i < 3 and the coset block {0, 1, g^17, g^34};
    indices refer to the block order produced by ``develop``.
    """
    classes = []
    for h in range(17):
        cls = [j * 51 + (17 * i + h) % 51 for j in range(4) for i in range(3)]
        cls.append(4 * 51 + h)
        classes.append(tuple(sorted(cls)))
    return Resolution(tuple(classes))


def paper_design(name: str) -> tuple[Design, Resolution | None]:
    """Develop a stored family; the 52-4-1 resolution is re-verified before returning."""
    d = develop(paper_family(name), paper_mode(name))
    if name != "52-4-1":
        return d, None
    res = resolution_52()
    if not verify_resolution(d, res):
        raise InvalidFamily("stored resolution does not resolve the developed design")
    return d, res
