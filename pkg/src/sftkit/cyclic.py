"""Reduced cyclic chain complex of a free dg-algebra.

Nonempty words are identified under the signed rotation operator
t(g_1 ... g_l) = (-1)^{|g_1|(|g_2|+...+|g_l|)} g_2 ... g_l g_1; classes whose
rotation orbit returns to the same word with sign -1 vanish rationally and
are omitted.  The algebra differential descends to the coinvariants, and
reduced cyclic homology is the homology of the resulting complex.

Degree-0 generators are rejected: each graded piece must be a finite module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .dga import (
    DGA,
    AlgebraElement,
    ChainComplex,
    Coeff,
    HomologySummary,
    Word,
    coeff_one,
    coeff_zero,
    homology,
    word_basis,
)
from .errors import InfiniteBasis, NonComposable


@dataclass(frozen=True)
class CyclicWord:
    """A nonzero rotation class, stored through its canonical representative."""

    word: Word
    degree: int
    link: Optional[int]

    def __str__(self):
        return "[" + "*".join(self.word) + "]"


def _rotations(dga: DGA, word: Word):
    """Yield (rotated normalized word, sign) over one full cycle, or None if
    the class dies (some rotation returns a word already seen with the
    opposite sign)."""
    seen: Dict[Word, int] = {}
    current = word
    sign = 1
    for _ in range(len(word)):
        if current in seen:
            if seen[current] != sign:
                return None
            break
        seen[current] = sign
        first = current[0]
        rest = current[1:]
        koszul = -1 if (dga.generators[first].parity and dga.degree_of_word(rest) % 2) else 1
        rotated, extra = dga.normalize_word(rest + (first,), koszul)
        if not extra:
            return None  # rotation hits an odd square in commutative mode
        current = rotated
        sign = sign * (1 if extra == coeff_one(dga.ring) else -1)
    else:
        # full cycle: returning to the start with -1 kills the class
        if current == word and sign == -1:
            return None
        if current in seen and seen[current] != sign:
            return None
    return seen


def rotation_class(dga: DGA, word: Word) -> Optional[Tuple[Word, int]]:
    """Canonical representative of the rotation class of ``word`` and the
    sign relating the word to it; None for classes that vanish."""
    if not word:
        raise ValueError("cyclic words are nonempty")
    try:
        seen = _rotations(dga, word)
    except NonComposable:
        return None  # the word does not close up cyclically
    if seen is None:
        return None
    canonical = min(seen)
    return canonical, seen[canonical]


def project_word(dga: DGA, word: Word, coeff) -> Optional[Tuple[Word, Coeff]]:
    """Project a free-algebra word into the coinvariants."""
    cls = rotation_class(dga, word)
    if cls is None:
        return None
    canonical, sign = cls
    return canonical, coeff * sign


def cyclic_basis(dga: DGA, lo: int, hi: int, link: Optional[int] = None) -> Dict[int, Tuple[CyclicWord, ...]]:
    """Canonical representatives of the nonzero classes, per degree in [lo, hi]."""
    if any(g.degree <= 0 for g in dga.generators.values()):
        raise InfiniteBasis("cyclic bases need strictly positive generator degrees")
    out: Dict[int, Tuple[CyclicWord, ...]] = {}
    for k in range(lo, hi + 1):
        reps = {}
        if k >= 1:
            for word in word_basis(dga, k):
                if not word:
                    continue
                if link is not None and dga.link_of_word(word) != link:
                    continue
                cls = rotation_class(dga, word)
                if cls is None:
                    continue
                canonical, _ = cls
                if canonical not in reps:
                    reps[canonical] = CyclicWord(canonical, k, dga.link_of_word(canonical))
        out[k] = tuple(reps[w] for w in sorted(reps))
    return out


def cyclic_differential(dga: DGA, cw: CyclicWord) -> Dict[Word, Coeff]:
    """Differential of a class: differentiate the representative, project."""
    image = dga.apply_differential(
        AlgebraElement(dga.ring, {cw.word: coeff_one(dga.ring)})
    )
    acc: Dict[Word, Coeff] = {}
    for word, coeff in image.terms.items():
        if not word:
            continue  # constants die in the quotient by the ground ring
        projected = project_word(dga, word, coeff)
        if projected is None:
            continue
        canonical, value = projected
        total = acc.get(canonical, coeff_zero(dga.ring)) + value
        if total:
            acc[canonical] = total
        elif canonical in acc:
            del acc[canonical]
    return acc


def cyclic_complex(dga: DGA, lo: int, hi: int, link: Optional[int] = None) -> ChainComplex:
    """Coinvariant complex on [lo-1, hi+1], ready for homology in [lo, hi]."""
    span_lo = max(lo - 1, 0)
    basis_words = cyclic_basis(dga, span_lo, hi + 1, link=link)
    basis = {k: tuple(cw.word for cw in words) for k, words in basis_words.items()}
    boundary = {}
    from .ring import ExactMatrix

    for k in range(span_lo + 1, hi + 2):
        rows, cols = basis.get(k - 1, ()), basis.get(k, ())
        if not rows or not cols:
            continue
        row_index = {w: i for i, w in enumerate(rows)}
        mat = [[coeff_zero(dga.ring)] * len(cols) for _ in range(len(rows))]
        nonzero = False
        for j, word in enumerate(cols):
            cw = CyclicWord(word, k, dga.link_of_word(word))
            for target, coeff in cyclic_differential(dga, cw).items():
                if target not in row_index:
                    raise ValueError(
                        f"differential left the enumerated window at {target}"
                    )
                mat[row_index[target]][j] = coeff
                nonzero = True
        if nonzero:
            boundary[k] = ExactMatrix(dga.ring, mat)
    return ChainComplex(dga.ring, basis, boundary)


def reduced_cyclic_homology(
    dga: DGA, lo: int, hi: int, link: Optional[int] = None
) -> Dict[int, HomologySummary]:
    """Exact per-degree homology of the reduced cyclic complex on [lo, hi]."""
    cx = cyclic_complex(dga, lo, hi, link=link)
    return homology(cx, lo, hi)
