"""Free graded dg-algebras over Q or Q[U].

Two flavors are supported.  "commutative" is the free supercommutative
algebra on a set of good generators: words are kept sorted in a canonical
order, transpositions of odd generators contribute Koszul signs, and odd
squares vanish.  "associative" is the free associative algebra over a
semisimple base with one idempotent per component: words are kept verbatim
and adjacent chords must have matching endpoint components.

Elements are finite linear combinations of normalized words with exact
coefficients (Fraction over Q, UPoly over Q[U]).  On top of the algebra:
the derivation extension of a differential, d^2 checking, augmentations,
linearization, evaluation U := s, and homology of the resulting complexes
of free modules, with torsion invariant factors over Q[U].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import InfiniteBasis, NonComposable, NotAChainMap
from .ring import RING_Q, RING_QU, ExactMatrix, UPoly, rat, smith_normal_form

Coeff = Union[Fraction, UPoly]
Word = Tuple[str, ...]

MODE_COMMUTATIVE = "commutative"
MODE_ASSOCIATIVE = "associative"


@dataclass(frozen=True)
class Generator:
    """A named Reeb orbit or chord with its gradings.

    ``kind`` is ("orbit",) or ("chord", source_component, target_component).
    Parity is the homological degree mod 2.  Bad generators are rejected at
    algebra construction, so anything inside a DGA is good.
    """

    name: str
    degree: int
    link: Optional[int] = None
    kind: tuple = ("orbit",)
    good: bool = True

    @property
    def parity(self) -> int:
        return self.degree & 1

    @property
    def is_chord(self) -> bool:
        return self.kind[0] == "chord"

    def sort_key(self) -> tuple:
        return (self.degree, self.link if self.link is not None else 0, self.name)


def coeff_zero(ring: str) -> Coeff:
    return Fraction(0) if ring == RING_Q else UPoly()


def coeff_one(ring: str) -> Coeff:
    return Fraction(1) if ring == RING_Q else UPoly.const(1)


def coerce_coeff(ring: str, x) -> Coeff:
    if ring == RING_Q:
        if isinstance(x, UPoly):
            if x.degree > 0:
                raise ValueError("polynomial coefficient in a Q algebra")
            return x.coeffs[0] if x.coeffs else Fraction(0)
        return rat(x)
    if isinstance(x, UPoly):
        return x
    return UPoly.const(rat(x))


class AlgebraElement:
    """Finite linear combination of normalized words."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: str, terms: Optional[Dict[Word, Coeff]] = None):
        clean = {}
        for word, coeff in (terms or {}).items():
            coeff = coerce_coeff(ring, coeff)
            if coeff:
                clean[tuple(word)] = coeff
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("AlgebraElement is immutable")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, coeff_zero(self.ring)) + c
        return AlgebraElement(self.ring, out)

    def __neg__(self):
        return AlgebraElement(self.ring, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, factor) -> "AlgebraElement":
        factor = coerce_coeff(self.ring, factor)
        return AlgebraElement(self.ring, {w: c * factor for w, c in self.terms.items()})

    def sorted_terms(self) -> List[Tuple[Word, Coeff]]:
        return sorted(self.terms.items(), key=lambda wc: (len(wc[0]), wc[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for word, coeff in self.sorted_terms():
            wtxt = "*".join(word) if word else "1"
            bits.append(f"({coeff})*{wtxt}")
        return " + ".join(bits)

    __repr__ = __str__


class DGA:
    """A free graded dg-algebra with an explicit differential table."""

    def __init__(
        self,
        ring: str,
        mode: str,
        generators: Sequence[Generator],
        differential: Optional[Dict[str, AlgebraElement]] = None,
        components: int = 1,
    ):
        if ring not in (RING_Q, RING_QU):
            raise ValueError(f"unknown ring {ring!r}")
        if mode not in (MODE_COMMUTATIVE, MODE_ASSOCIATIVE):
            raise ValueError(f"unknown mode {mode!r}")
        if components < 1:
            raise ValueError("need at least one base component")
        table: Dict[str, Generator] = {}
        for g in sorted(generators, key=Generator.sort_key):
            if not g.good:
                raise ValueError(f"bad generator {g.name!r} rejected at construction")
            if g.name in table:
                raise ValueError(f"duplicate generator {g.name!r}")
            if g.is_chord:
                src, tgt = g.kind[1], g.kind[2]
                if not (0 <= src < components and 0 <= tgt < components):
                    raise ValueError(f"chord {g.name!r} has components outside the base")
            table[g.name] = g
        self.ring = ring
        self.mode = mode
        self.components = components
        self.generators = table
        diff: Dict[str, AlgebraElement] = {}
        for name, elem in (differential or {}).items():
            if name not in table:
                raise ValueError(f"differential on unknown generator {name!r}")
            diff[name] = self.normalize_element(elem)
        self.differential = diff

    # basic structure -------------------------------------------------------

    def generator(self, name: str) -> Generator:
        return self.generators[name]

    def degree_of_word(self, word: Word) -> int:
        return sum(self.generators[g].degree for g in word)

    def link_of_word(self, word: Word) -> Optional[int]:
        links = [self.generators[g].link for g in word]
        if any(l is None for l in links):
            return None
        return sum(links)

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self.ring)

    def unit(self) -> AlgebraElement:
        return AlgebraElement(self.ring, {(): coeff_one(self.ring)})

    def element(self, terms: Dict[Word, Coeff]) -> AlgebraElement:
        return self.normalize_element(AlgebraElement(self.ring, terms))

    # normalization ---------------------------------------------------------

    def normalize_word(self, word: Iterable[str], coeff=1) -> Tuple[Word, Coeff]:
        """Canonical form of a raw word; a zero result has coefficient 0.

        Commutative mode sorts with Koszul signs and kills odd squares;
        associative mode keeps the order and checks chord composability.
        """
        word = tuple(word)
        coeff = coerce_coeff(self.ring, coeff)
        for g in word:
            if g not in self.generators:
                raise KeyError(f"unknown generator {g!r}")
        if self.mode == MODE_ASSOCIATIVE:
            self._check_composable(word)
            return word, coeff

        letters = list(word)
        sign = 1
        # insertion sort; count transpositions of odd-degree pairs
        for i in range(1, len(letters)):
            j = i
            while j > 0 and self._gen_key(letters[j - 1]) > self._gen_key(letters[j]):
                if self.generators[letters[j - 1]].parity and self.generators[letters[j]].parity:
                    sign = -sign
                letters[j - 1], letters[j] = letters[j], letters[j - 1]
                j -= 1
        for a, b in zip(letters, letters[1:]):
            if a == b and self.generators[a].parity:
                return tuple(letters), coeff_zero(self.ring)
        return tuple(letters), coeff * sign

    def _gen_key(self, name: str) -> tuple:
        return self.generators[name].sort_key()

    def _check_composable(self, word: Word):
        for left, right in zip(word, word[1:]):
            gl, gr = self.generators[left], self.generators[right]
            if gl.is_chord and gr.is_chord:
                # c_{ij} = e_j c_{ij} e_i : the right unit of the left factor
                # must match the left unit of the right factor.
                if gl.kind[1] != gr.kind[2]:
                    raise NonComposable(
                        f"{left!r} (from component {gl.kind[1]}) cannot follow "
                        f"{right!r} (into component {gr.kind[2]})"
                    )

    def normalize_element(self, elem: AlgebraElement) -> AlgebraElement:
        out: Dict[Word, Coeff] = {}
        for word, coeff in elem.terms.items():
            nw, nc = self.normalize_word(word, coeff)
            if nc:
                out[nw] = out.get(nw, coeff_zero(self.ring)) + nc
        return AlgebraElement(self.ring, out)

    def multiply(self, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
        out: Dict[Word, Coeff] = {}
        for wa, ca in a.terms.items():
            for wb, cb in b.terms.items():
                nw, nc = self.normalize_word(wa + wb, ca * cb)
                if nc:
                    out[nw] = out.get(nw, coeff_zero(self.ring)) + nc
        return AlgebraElement(self.ring, out)

    # differential ----------------------------------------------------------

    def d_of_generator(self, name: str) -> AlgebraElement:
        return self.differential.get(name, self.zero())

    def apply_differential(self, elem: AlgebraElement) -> AlgebraElement:
        """Derivation extension: d(xy) = (dx)y + (-1)^|x| x(dy)."""
        acc: Dict[Word, Coeff] = {}
        for word, coeff in elem.terms.items():
            sign = 1
            for i, letter in enumerate(word):
                dg = self.differential.get(letter)
                if dg is not None and dg.terms:
                    prefix, suffix = word[:i], word[i + 1:]
                    for dword, dcoeff in dg.terms.items():
                        nw, nc = self.normalize_word(
                            prefix + dword + suffix, coeff * dcoeff * sign
                        )
                        if nc:
                            acc[nw] = acc.get(nw, coeff_zero(self.ring)) + nc
                if self.generators[letter].parity:
                    sign = -sign
        return AlgebraElement(self.ring, acc)

    def check_d_squared(self) -> List[Tuple[str, AlgebraElement]]:
        """Nonzero residues d(d(x)) per generator; empty list means d^2 = 0."""
        residues = []
        for name in self.generators:
            r = self.apply_differential(self.d_of_generator(name))
            if r:
                residues.append((name, r))
        return residues

    def check_bidegree(self) -> List[str]:
        """Terms of the differential violating degree -1 or link-degree 0."""
        problems = []
        linked = all(g.link is not None for g in self.generators.values())
        for name, image in self.differential.items():
            g = self.generators[name]
            for word in image.terms:
                if self.degree_of_word(word) != g.degree - 1:
                    problems.append(
                        f"d({name}) has a term of degree {self.degree_of_word(word)}, "
                        f"wanted {g.degree - 1}"
                    )
                if linked and self.link_of_word(word) != g.link:
                    problems.append(
                        f"d({name}) has a term of linking degree "
                        f"{self.link_of_word(word)}, wanted {g.link}"
                    )
        return problems

    # evaluation -------------------------------------------------------------

    def evaluate_U(self, s) -> "DGA":
        """Substitute U := s throughout; lands in a Q-algebra."""
        if self.ring == RING_Q:
            raise ValueError("algebra already has rational coefficients")
        s = rat(s)
        diff = {
            name: AlgebraElement(
                RING_Q, {w: c.evaluate(s) for w, c in elem.terms.items()}
            )
            for name, elem in self.differential.items()
        }
        return DGA(RING_Q, self.mode, list(self.generators.values()), diff, self.components)


# augmentations and linearization -------------------------------------------


@dataclass(frozen=True)
class Augmentation:
    """A verified algebra map to the ground ring, supported in degree 0."""

    values: Tuple[Tuple[str, Coeff], ...]

    def value(self, name: str) -> Coeff:
        for n, c in self.values:
            if n == name:
                return c
        raise KeyError(name)


def augment(dga: DGA, eps: Optional[Dict[str, Coeff]] = None) -> Augmentation:
    """Check that eps (default: zero) kills the differential and wrap it.

    eps must vanish off degree 0; eps(d x) != 0 raises NotAChainMap naming
    the violating generator.  The zero augmentation is valid exactly when no
    differential has a constant term.
    """
    eps = dict(eps or {})
    values: Dict[str, Coeff] = {}
    for name, g in dga.generators.items():
        c = coerce_coeff(dga.ring, eps.get(name, 0))
        if c and g.degree != 0:
            raise ValueError(
                f"augmentation supported on {name!r} of degree {g.degree}; needs degree 0"
            )
        values[name] = c

    def eps_of_element(elem: AlgebraElement) -> Coeff:
        total = coeff_zero(dga.ring)
        for word, coeff in elem.terms.items():
            factor = coeff
            for letter in word:
                factor = factor * values[letter]
                if not factor:
                    break
            total = total + factor
        return total

    for name in dga.generators:
        residue = eps_of_element(dga.d_of_generator(name))
        if residue:
            raise NotAChainMap(name, f"eps(d {name}) = {residue} != 0")
    return Augmentation(tuple(sorted(values.items())))


class HomologySummary(NamedTuple):
    free_rank: int
    torsion: tuple  # invariant factors that are not units (Q[U] only)


@dataclass(frozen=True)
class ChainComplex:
    """Finite complex of free modules with labeled bases.

    ``boundary[k]`` is the matrix of d: C_k -> C_{k-1} with respect to the
    stored bases (rows indexed by the degree k-1 basis).
    """

    ring: str
    basis: Dict[int, Tuple]
    boundary: Dict[int, ExactMatrix]

    def dim(self, k: int) -> int:
        return len(self.basis.get(k, ()))

    def boundary_matrix(self, k: int) -> ExactMatrix:
        if k in self.boundary:
            return self.boundary[k]
        return ExactMatrix.zeros(self.ring, self.dim(k - 1), self.dim(k))

    def verify(self):
        for k in sorted(self.basis):
            if self.dim(k) and self.dim(k - 1) and self.dim(k - 2):
                prod = self.boundary_matrix(k - 1) @ self.boundary_matrix(k)
                if prod != ExactMatrix.zeros(self.ring, self.dim(k - 2), self.dim(k)):
                    raise ValueError(f"d^2 != 0 from degree {k}")
        return self


def linearize(dga: DGA, aug: Augmentation) -> ChainComplex:
    """Linearized complex at an augmentation: basis the generators.

    Each generator is shifted by its augmentation value and only the terms
    that are linear afterwards survive; concretely a word g_1..g_m in d(x)
    contributes eps(g_1)..eps(g_{i-1}) * eps(g_{i+1})..eps(g_m) to the
    coefficient of g_i.
    """
    degrees = sorted({g.degree for g in dga.generators.values()})
    basis = {d: tuple(n for n, g in dga.generators.items() if g.degree == d) for d in degrees}
    index = {
        d: {name: i for i, name in enumerate(names)} for d, names in basis.items()
    }

    columns: Dict[int, Dict[Tuple[int, int], Coeff]] = {}
    for name, g in dga.generators.items():
        col = index[g.degree][name]
        image = dga.d_of_generator(name)
        for word, coeff in image.terms.items():
            for i, letter in enumerate(word):
                factor = coeff
                for j, other in enumerate(word):
                    if j == i:
                        continue
                    factor = factor * coerce_coeff(dga.ring, aug.value(other))
                    if not factor:
                        break
                if not factor:
                    continue
                target = dga.generators[letter]
                if target.degree != g.degree - 1:
                    raise ValueError(
                        f"d({name}) is not homogeneous of degree -1 at word {word}"
                    )
                row = index[target.degree][letter]
                cell = columns.setdefault(g.degree, {})
                cell[(row, col)] = cell.get((row, col), coeff_zero(dga.ring)) + factor

    boundary = {}
    for k, cells in columns.items():
        nrows, ncols = len(basis.get(k - 1, ())), len(basis.get(k, ()))
        rows = [[coeff_zero(dga.ring)] * ncols for _ in range(nrows)]
        for (r, c), val in cells.items():
            rows[r][c] = val
        mat = ExactMatrix(dga.ring, rows)
        if any(v for row in mat.rows for v in row):
            boundary[k] = mat
    return ChainComplex(dga.ring, basis, boundary).verify()


def word_basis(dga: DGA, degree: int) -> Tuple[Word, ...]:
    """All normalized words of a given degree, requiring positive generator degrees."""
    gens = sorted(dga.generators.values(), key=Generator.sort_key)
    if any(g.degree <= 0 for g in gens):
        raise InfiniteBasis("word bases need strictly positive generator degrees")
    if degree < 0:
        return ()
    if degree == 0:
        return ((),)
    out: List[Word] = []
    if dga.mode == MODE_COMMUTATIVE:

        def rec(i: int, remaining: int, acc: List[str]):
            if remaining == 0:
                out.append(tuple(acc))
                return
            if i == len(gens):
                return
            g = gens[i]
            rec(i + 1, remaining, acc)
            max_mult = 1 if g.parity else remaining // g.degree
            for mult in range(1, max_mult + 1):
                cost = mult * g.degree
                if cost > remaining:
                    break
                rec(i + 1, remaining - cost, acc + [g.name] * mult)

        rec(0, degree, [])
        return tuple(sorted(out))

    def rec_assoc(remaining: int, acc: List[str]):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for g in gens:
            if g.degree > remaining:
                continue
            if acc and g.is_chord:
                prev = dga.generators[acc[-1]]
                if prev.is_chord and prev.kind[1] != g.kind[2]:
                    continue
            rec_assoc(remaining - g.degree, acc + [g.name])

    rec_assoc(degree, [])
    return tuple(sorted(out))


def word_complex(dga: DGA, lo: int, hi: int) -> ChainComplex:
    """The full algebra as a complex of free modules on word bases in [lo, hi]."""
    basis = {k: word_basis(dga, k) for k in range(lo, hi + 1)}
    boundary: Dict[int, ExactMatrix] = {}
    for k in range(lo + 1, hi + 1):
        rows_basis, cols_basis = basis.get(k - 1, ()), basis.get(k, ())
        if not rows_basis or not cols_basis:
            continue
        row_index = {w: i for i, w in enumerate(rows_basis)}
        mat = [[coeff_zero(dga.ring)] * len(cols_basis) for _ in range(len(rows_basis))]
        nonzero = False
        for j, word in enumerate(cols_basis):
            image = dga.apply_differential(AlgebraElement(dga.ring, {word: coeff_one(dga.ring)}))
            for w, c in image.terms.items():
                if w in row_index:
                    mat[row_index[w]][j] = c
                    nonzero = True
        if nonzero:
            boundary[k] = ExactMatrix(dga.ring, mat)
    return ChainComplex(dga.ring, basis, boundary)


# interchange ---------------------------------------------------------------


def _kind_to_str(kind: tuple) -> str:
    if kind[0] == "orbit":
        return "orbit"
    return f"chord:{kind[1]}:{kind[2]}"


def _kind_from_str(text: str) -> tuple:
    if text == "orbit":
        return ("orbit",)
    parts = text.split(":")
    if len(parts) == 3 and parts[0] == "chord":
        return ("chord", int(parts[1]), int(parts[2]))
    raise ValueError(f"unknown generator kind {text!r}")


def _coeff_to_doc(ring: str, c: Coeff) -> List[dict]:
    if ring == RING_Q:
        return [{"coeff": str(c), "upow": 0}]
    return [
        {"coeff": str(q), "upow": i}
        for i, q in enumerate(c.coeffs)
        if q
    ]


def dga_to_doc(dga: DGA) -> dict:
    """Serialize to the interchange schema (deterministic ordering)."""
    gens = [
        {
            "name": g.name,
            "deg": g.degree,
            "link": g.link,
            "good": g.good,
            "kind": _kind_to_str(g.kind),
        }
        for g in dga.generators.values()
    ]
    diff = {}
    for name in sorted(dga.differential):
        entries = []
        for word, coeff in dga.differential[name].sorted_terms():
            for piece in _coeff_to_doc(dga.ring, coeff):
                entries.append({**piece, "word": list(word)})
        if entries:
            diff[name] = entries
    doc = {"ring": dga.ring, "mode": dga.mode, "generators": gens, "differential": diff}
    if dga.mode == MODE_ASSOCIATIVE:
        doc["components"] = dga.components
    return doc


def dga_from_doc(doc: dict) -> DGA:
    try:
        ring = doc["ring"]
        mode = doc["mode"]
        components = int(doc.get("components", 1))
        gens = [
            Generator(
                name=str(g["name"]),
                degree=int(g["deg"]),
                link=None if g.get("link") is None else int(g["link"]),
                good=bool(g.get("good", True)),
                kind=_kind_from_str(g.get("kind", "orbit")),
            )
            for g in doc["generators"]
        ]
        diff = {}
        for name, entries in doc.get("differential", {}).items():
            terms: Dict[Word, Coeff] = {}
            for entry in entries:
                word = tuple(str(x) for x in entry["word"])
                q = rat(str(entry["coeff"]))
                upow = int(entry.get("upow", 0))
                if ring == RING_Q:
                    if upow != 0:
                        raise ValueError("upow must be 0 over Q")
                    add: Coeff = q
                else:
                    add = UPoly.monomial(upow, q)
                zero = coeff_zero(ring)
                terms[word] = terms.get(word, zero) + add
            diff[name] = AlgebraElement(ring, terms)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed algebra document: {exc}") from exc
    return DGA(ring, mode, gens, diff, components)


def homology(cx: ChainComplex, lo: int, hi: int) -> Dict[int, HomologySummary]:
    """Per-degree homology of a complex of free modules.

    Over Q the answer is a rank; over Q[U] the kernel is computed from the
    Smith form of the outgoing boundary and the incoming image is presented
    inside it, so the summary also lists torsion invariant factors.
    """
    out: Dict[int, HomologySummary] = {}
    for k in range(lo, hi + 1):
        n = cx.dim(k)
        if n == 0:
            out[k] = HomologySummary(0, ())
            continue
        d_out = cx.boundary_matrix(k)
        d_in = cx.boundary_matrix(k + 1)
        if cx.ring == RING_Q:
            rank_out = d_out.rank() if d_out.nrows else 0
            rank_in = d_in.rank() if d_in.ncols and d_in.nrows else 0
            out[k] = HomologySummary(n - rank_out - rank_in, ())
            continue

        if d_out.nrows == 0:
            kernel_dim = n
            kernel_coords = ExactMatrix.identity(cx.ring, n)
        else:
            snf = smith_normal_form(d_out)
            r = len(snf.factors)
            kernel_dim = n - r
            kernel_coords = snf.right_inverse
        if kernel_dim == 0:
            out[k] = HomologySummary(0, ())
            continue
        if d_in.ncols == 0 or d_in.nrows == 0:
            out[k] = HomologySummary(kernel_dim, ())
            continue
        coords = kernel_coords @ d_in
        r = n - kernel_dim
        for i in range(r):
            for j in range(d_in.ncols):
                if coords.rows[i][j]:
                    raise ValueError("image does not land in the kernel; d^2 != 0?")
        pres = ExactMatrix(cx.ring, [coords.rows[i] for i in range(r, n)])
        psnf = smith_normal_form(pres)
        torsion = tuple(f for f in psnf.factors if f.degree > 0)
        out[k] = HomologySummary(kernel_dim - len(psnf.factors), torsion)
    return out
