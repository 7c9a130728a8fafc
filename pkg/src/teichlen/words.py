"""Group words over matrix generators, length spectra and systoles.

Letters are integers: generator ``i`` is letter ``2*i`` and its inverse is
``2*i + 1``, so ``letter ^ 1`` inverts a letter.  Enumeration keeps freely
reduced, cyclically reduced words and one representative per cyclic
rotation class (the lexicographically smallest rotation).

The spectrum built from words of length at most ``max_len`` is a
lower approximation of the true length spectrum: every length it reports
is a genuine closed-geodesic length, but short geodesics whose shortest
word is longer than ``max_len`` are missed.  Length buckets merge words
whose lengths agree within ``MERGE_TOL``; bucket multiplicities are upper
bounds on the number of conjugacy classes since relators are not used to
identify words.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import NoHyperbolicWord
from .isometry import CLASSIFY_TOL, Isometry, length_from_trace
from .report import BoundReport, compare

MERGE_TOL = 1e-8
RELATOR_TOL = 1e-8

Word = tuple[int, ...]


@dataclass(frozen=True)
class GroupPresentation:
    """Matrix generators with optional relators.

    ``conjugates``, when given, holds for each generator its image under a
    nontrivial automorphism of the entry field (complex 2x2 arrays).  Word
    traces computed from these are the Galois conjugates of the real traces.
    """

    labels: tuple[str, ...]
    matrices: tuple[Isometry, ...]
    relators: tuple[Word, ...] = ()
    conjugates: tuple[np.ndarray, ...] | None = field(default=None, compare=False)
    name: str = "custom"

    def __post_init__(self):
        if len(self.labels) != len(self.matrices) or not self.labels:
            raise ValueError("need one label per generator and at least one generator")
        for r in self.relators:
            m = evaluate_word(self, r)
            if not (
                np.allclose(m, np.eye(2), rtol=0, atol=RELATOR_TOL)
                or np.allclose(m, -np.eye(2), rtol=0, atol=RELATOR_TOL)
            ):
                raise ValueError(f"relator {format_word(self, r)} is not +-identity")

    @property
    def rank(self) -> int:
        return len(self.labels)

    def letter_matrices(self) -> np.ndarray:
        """Array of shape (2k, 2, 2): generator, inverse, generator, inverse, ..."""
        out = []
        for m in self.matrices:
            out.append(m.as_array())
            out.append(m.inverse().as_array())
        return np.array(out)

    def conjugate_letter_matrices(self) -> np.ndarray | None:
        if self.conjugates is None:
            return None
        out = []
        for m in self.conjugates:
            m = np.asarray(m, dtype=complex)
            inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
            out.append(m)
            out.append(inv)
        return np.array(out)

    def conjugated(self, s: Isometry) -> GroupPresentation:
        """The presentation with every generator replaced by ``s g s^-1``."""
        return GroupPresentation(
            labels=self.labels,
            matrices=tuple(m.conjugate_by(s) for m in self.matrices),
            relators=self.relators,
            conjugates=self.conjugates,
            name=self.name,
        )


def format_word(p: GroupPresentation, word: Sequence[int]) -> str:
    return " ".join(
        p.labels[l >> 1] + ("^-1" if l & 1 else "") for l in word
    )


def parse_word(p: GroupPresentation, text: str) -> Word:
    index = {lab: i for i, lab in enumerate(p.labels)}
    letters = []
    for tok in text.split():
        inv = tok.endswith("^-1")
        lab = tok[:-3] if inv else tok
        letters.append(2 * index[lab] + int(inv))
    return tuple(letters)


def evaluate_word(p: GroupPresentation, word: Sequence[int]) -> np.ndarray:
    mats = p.letter_matrices()
    m = np.eye(2)
    for l in word:
        m = m @ mats[l]
    return m


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != word[i + 1] ^ 1 for i in range(len(word) - 1))


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    return is_reduced(word) and (len(word) < 2 or word[0] != word[-1] ^ 1)


def is_rotation_minimal(word: Sequence[int]) -> bool:
    w = tuple(word)
    return all(w <= w[r:] + w[:r] for r in range(1, len(w)))


def enumerate_words(
    p: GroupPresentation, max_len: int, cyclic: bool = True
) -> Iterator[Word]:
    """Depth-first stream of freely reduced words of length ``1..max_len``.

    With ``cyclic=True`` only cyclically reduced words that are the smallest
    of their rotations are yielded.  With ``cyclic=False`` every freely
    reduced word is yielded, ``2k(2k-1)^(n-1)`` of exact length ``n``.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    nletters = 2 * p.rank
    stack: list[Word] = [(l,) for l in reversed(range(nletters))]
    by_length: list[list[Word]] = [[] for _ in range(max_len + 1)]
    while stack:
        w = stack.pop()
        if not cyclic or (is_cyclically_reduced(w) and is_rotation_minimal(w)):
            by_length[len(w)].append(w)
        if len(w) < max_len:
            last = w[-1]
            for l in reversed(range(nletters)):
                if l != last ^ 1:
                    stack.append(w + (l,))
    for n in range(1, max_len + 1):
        yield from by_length[n]


# -- vectorized enumeration ------------------------------------------------


def _letter_bits(nletters: int) -> int:
    return max(1, (nletters - 1).bit_length())


def _rotation_minimal_mask(codes: np.ndarray, n: int, bits: int) -> np.ndarray:
    mask = (1 << (bits * n)) - 1
    keep = np.ones(codes.shape, dtype=bool)
    for r in range(1, n):
        rot = ((codes << (bits * r)) | (codes >> (bits * (n - r)))) & mask
        keep &= codes <= rot
    return keep


@dataclass
class WordTraces:
    """Canonical cyclic words with their traces, as parallel arrays."""

    word_length: np.ndarray
    codes: np.ndarray
    traces: np.ndarray
    conjugate_traces: np.ndarray | None
    bits: int

    def word(self, i: int) -> Word:
        n = int(self.word_length[i])
        code = int(self.codes[i])
        m = (1 << self.bits) - 1
        return tuple((code >> (self.bits * (n - 1 - j))) & m for j in range(n))

    def __len__(self) -> int:
        return len(self.codes)


def word_traces(
    p: GroupPresentation,
    max_len: int,
    first_letters: Sequence[int] | None = None,
    with_conjugates: bool = False,
) -> WordTraces:
    """Traces of all canonical cyclic words of length ``<= max_len``.

    Words are grown level by level as stacked matrix products.  Restricting
    ``first_letters`` partitions the work; rotation-minimal words are then
    attributed to the partition of their first letter, so partitions are
    disjoint and their union is the full set.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    mats = p.letter_matrices()
    cmats = p.conjugate_letter_matrices() if with_conjugates else None
    if with_conjugates and cmats is None:
        raise ValueError(f"presentation {p.name!r} carries no conjugate generators")
    nletters = len(mats)
    bits = _letter_bits(nletters)
    if bits * max_len > 62:
        raise ValueError("max_len too large for packed word codes")
    first = np.array(
        sorted(range(nletters) if first_letters is None else first_letters),
        dtype=np.int64,
    )

    cur_m = mats[first]
    cur_c = cmats[first] if cmats is not None else None
    cur_first = first.copy()
    cur_last = first.copy()
    cur_code = first.copy()

    out_len, out_code, out_tr, out_ctr = [], [], [], []

    def emit(n, code, fl, ll, tr, ctr):
        keep = fl != (ll ^ 1) if n > 1 else np.ones(code.shape, dtype=bool)
        keep &= _rotation_minimal_mask(code, n, bits)
        out_len.append(np.full(int(keep.sum()), n, dtype=np.int64))
        out_code.append(code[keep])
        out_tr.append(tr[keep])
        if ctr is not None:
            out_ctr.append(ctr[keep])

    emit(1, cur_code, cur_first, cur_last, np.trace(cur_m, axis1=1, axis2=2),
         None if cur_c is None else np.trace(cur_c, axis1=1, axis2=2))

    for n in range(2, max_len + 1):
        final = n == max_len
        nm, nc, nf, nl, ncode, ntr, nctr = [], [], [], [], [], [], []
        for l in range(nletters):
            sel = cur_last != (l ^ 1)
            if not sel.any():
                continue
            base = cur_m[sel]
            g = mats[l]
            if final:
                # trace(M g) without forming the product
                ntr.append(np.einsum("nij,ji->n", base, g))
            else:
                prod = base @ g
                nm.append(prod)
                ntr.append(prod[:, 0, 0] + prod[:, 1, 1])
            if cur_c is not None:
                cb = cur_c[sel]
                if final:
                    nctr.append(np.einsum("nij,ji->n", cb, cmats[l]))
                else:
                    cp = cb @ cmats[l]
                    nc.append(cp)
                    nctr.append(cp[:, 0, 0] + cp[:, 1, 1])
            nf.append(cur_first[sel])
            nl.append(np.full(int(sel.sum()), l, dtype=np.int64))
            ncode.append((cur_code[sel] << bits) | l)
        f = np.concatenate(nf)
        last = np.concatenate(nl)
        code = np.concatenate(ncode)
        tr = np.concatenate(ntr)
        ctr = np.concatenate(nctr) if cur_c is not None else None
        emit(n, code, f, last, tr, ctr)
        if not final:
            cur_m = np.concatenate(nm)
            cur_c = np.concatenate(nc) if cur_c is not None else None
            cur_first, cur_last, cur_code = f, last, code

    return WordTraces(
        word_length=np.concatenate(out_len),
        codes=np.concatenate(out_code),
        traces=np.concatenate(out_tr),
        conjugate_traces=np.concatenate(out_ctr) if out_ctr else None,
        bits=bits,
    )


def _partitioned_word_traces(p, max_len, workers, with_conjugates=False):
    nletters = 2 * p.rank
    if workers <= 1:
        return word_traces(p, max_len, with_conjugates=with_conjugates)
    parts = [[l] for l in range(nletters)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        results = list(
            ex.map(
                word_traces,
                itertools.repeat(p),
                itertools.repeat(max_len),
                parts,
                itertools.repeat(with_conjugates),
            )
        )
    return WordTraces(
        word_length=np.concatenate([r.word_length for r in results]),
        codes=np.concatenate([r.codes for r in results]),
        traces=np.concatenate([r.traces for r in results]),
        conjugate_traces=(
            np.concatenate([r.conjugate_traces for r in results])
            if with_conjugates
            else None
        ),
        bits=results[0].bits,
    )


# -- spectra ---------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumEntry:
    length: float
    trace_abs: float
    multiplicity: int
    representative: Word


@dataclass(frozen=True)
class LengthSpectrum:
    entries: tuple[SpectrumEntry, ...]
    cutoff: float
    max_word_length: int
    presentation: GroupPresentation = field(repr=False, compare=False)

    def lengths(self) -> list[float]:
        return [e.length for e in self.entries]

    def to_rows(self) -> list[dict]:
        return [
            {
                "length": e.length,
                "trace_abs": e.trace_abs,
                "multiplicity": e.multiplicity,
                "representative": format_word(self.presentation, e.representative),
            }
            for e in self.entries
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(
            buf,
            fieldnames=["length", "trace_abs", "multiplicity", "representative"],
            lineterminator="\n",
        )
        w.writeheader()
        for row in self.to_rows():
            w.writerow({**row, "length": repr(row["length"]), "trace_abs": repr(row["trace_abs"])})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "cutoff": self.cutoff,
                "max_word_length": self.max_word_length,
                "complete": False,
                "entries": self.to_rows(),
            },
            indent=2,
        )


def _hyperbolic_sorted(wt: WordTraces, cutoff: float):
    """Indices of hyperbolic words with length <= cutoff, ordered by
    (length, word length, code), plus their lengths."""
    t = np.abs(wt.traces)
    hyp = t > 2.0 + CLASSIFY_TOL
    idx = np.nonzero(hyp)[0]
    lengths = 2.0 * np.arccosh(0.5 * t[idx])
    keep = lengths <= cutoff
    idx, lengths = idx[keep], lengths[keep]
    order = np.lexsort((wt.codes[idx], wt.word_length[idx], lengths))
    return idx[order], lengths[order]


def length_spectrum(
    p: GroupPresentation, max_len: int, cutoff: float, workers: int = 1
) -> LengthSpectrum:
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    wt = _partitioned_word_traces(p, max_len, workers)
    idx, lengths = _hyperbolic_sorted(wt, cutoff)
    entries = []
    start = 0
    for i in range(1, len(idx) + 1):
        if i == len(idx) or lengths[i] - lengths[start] > MERGE_TOL:
            bucket = idx[start:i]
            # representative: shortest word, then smallest code
            rep = int(bucket[np.lexsort((wt.codes[bucket], wt.word_length[bucket]))[0]])
            tr = abs(float(wt.traces[rep]))
            entries.append(
                SpectrumEntry(
                    length=length_from_trace(tr),
                    trace_abs=tr,
                    multiplicity=i - start,
                    representative=wt.word(rep),
                )
            )
            start = i
    return LengthSpectrum(tuple(entries), float(cutoff), int(max_len), p)


def systole(p: GroupPresentation, max_len: int, workers: int = 1) -> float:
    """Shortest translation length among words of length ``<= max_len``."""
    wt = _partitioned_word_traces(p, max_len, workers)
    t = np.abs(wt.traces)
    hyp = t[t > 2.0 + CLASSIFY_TOL]
    if hyp.size == 0:
        raise NoHyperbolicWord(f"no hyperbolic word of length <= {max_len}")
    return length_from_trace(float(hyp.min()))


def short_system_check(
    p: GroupPresentation, g: int, s: float, max_len: int, workers: int = 1
) -> BoundReport:
    """Count length classes below the short-curve parametrization bound.

    Passes when at least ``15g - 15`` distinct lengths (buckets) lie below
    ``20 log(4g) + 8 arcsinh(1/sinh(s/2))``.  Distinct lengths are a lower
    bound on distinct conjugacy classes.  This says nothing about whether the
    curves found are the ones that parametrize Teichmuller space.
    """
    from .bounds import main_bound

    if g < 2 or s <= 0:
        raise ValueError("need g >= 2 and s > 0")
    bound, required = main_bound(g, s)
    spec = length_spectrum(p, max_len, bound, workers=workers)
    found = len(spec.entries)
    return compare(
        "short-system-length-bound",
        found,
        ">=",
        required,
        citation="short curve parametrization: n <= 15g-15 curves of length <= 20log(4g)+8arcsinh(1/sinh(s/2))",
        inputs={"presentation": p.name, "g": g, "s": s, "max_word_length": max_len},
        notes=(
            f"bound = {bound!r}",
            f"word classes below bound = {sum(e.multiplicity for e in spec.entries)}",
            "lengths are a lower approximation limited by max_word_length",
            "injectivity of the length parametrization is not checked",
        ),
    )


# -- presets ---------------------------------------------------------------


def _bolza_matrices_disk(conjugate: bool):
    """Side pairings of the regular octagon with angles pi/4, in SU(1,1) form.

    ``g_k = R_k g_0 R_k^-1`` with ``R_k`` rotation by ``k pi/4`` and
    ``g_0 = [[1+sqrt2, sqrt(2+2sqrt2)], [sqrt(2+2sqrt2), 1+sqrt2]]``.
    With ``conjugate=True`` the automorphism ``sqrt2 -> -sqrt2`` (which sends
    ``zeta_8 -> zeta_8^3``) is applied to every entry.
    """
    import mpmath

    with mpmath.workdps(40):
        s2 = mpmath.sqrt(2)
        zeta = mpmath.exp(1j * mpmath.pi / 4)
        if conjugate:
            diag = 1 - s2
            off = 1j * mpmath.sqrt(2 * s2 - 2)
            zpow = 3
        else:
            diag = 1 + s2
            off = mpmath.sqrt(2 + 2 * s2)
            zpow = 1
        out = []
        for k in range(4):
            z = zeta ** (zpow * k)
            out.append(
                mpmath.matrix([[diag, off * z], [off / z, diag]])
            )
    return out


def bolza_generators() -> GroupPresentation:
    """Genus-2 Bolza surface group with four octagon side pairings.

    Relator ``g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3``.  The real matrices are
    the disk generators moved to the upper half-plane by the Cayley map and
    rounded to double precision from 40-digit values.  Word traces lie in
    Z[sqrt2]; ``conjugates`` carries the Galois-conjugate generators.
    """
    import mpmath

    with mpmath.workdps(40):
        K = mpmath.matrix([[1, -1j], [1, 1j]])
        Kinv = K ** -1
        real = []
        for m in _bolza_matrices_disk(conjugate=False):
            r = Kinv * m * K
            real.append(
                Isometry(*(float(mpmath.re(r[i, j])) for i, j in ((0, 0), (0, 1), (1, 0), (1, 1))))
            )
        conj = tuple(
            np.array([[complex(m[i, j]) for j in range(2)] for i in range(2)])
            for m in _bolza_matrices_disk(conjugate=True)
        )
    labels = ("g0", "g1", "g2", "g3")
    relator = (0, 3, 4, 7, 1, 2, 5, 6)
    return GroupPresentation(
        labels=labels, matrices=tuple(real), relators=(relator,), conjugates=conj, name="bolza"
    )


def translation_generator(length: float = 2.0) -> GroupPresentation:
    """Cyclic group generated by a translation of the given length."""
    return GroupPresentation(labels=("t",), matrices=(Isometry.translation(length),), name="translation")


def elliptic_generator(angle: float = math.pi / 3) -> GroupPresentation:
    """Cyclic group generated by the rotation of ``angle`` about ``i``."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return GroupPresentation(labels=("r",), matrices=(Isometry(c, s, -s, c),), name="elliptic")


PRESETS = {
    "bolza": bolza_generators,
    "translation": translation_generator,
    "elliptic": elliptic_generator,
}


def preset(name: str) -> GroupPresentation:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
