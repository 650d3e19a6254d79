"""Clasps (generalized Jones-Wenzl projectors) via the triple clasp recursion,
an independent linear-solve oracle, and local intersection forms computed
three ways: from matrices, from the conjectural product formula, and from the
explicit recursions available for n <= 4.
"""

from __future__ import annotations

import json
import os
import random
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DegenerateKappa,
    InvalidInput,
    NonUniqueSolution,
    NotDominant,
    UnsupportedRank,
)
from .evaluation import EvalMatrix, TensorBasis, eval_ladder
from .qring import ONE, ZERO, LaurentPoly, RatFun, qbinom, qint
from .webs import double_ladder, flip, light_ladder, light_tier, neutral_sort
from .weights import (
    GlWeight,
    SlWeight,
    canonical_sequence,
    dominant_weights_up_to,
    elementary_data,
    enumerate_paths,
    highest_weight,
    inversion_set,
    omega_set,
    pairing_A,
    sl_coords,
)

CACHE_ENV_VAR = "LADDERLAB_CACHE_DIR"
DEFAULT_CACHE_DIR = ".ladderlab-cache"
CACHE_VERSION = 1


@dataclass(frozen=True)
class ClaspRecord:
    lam: SlWeight
    sequence: tuple[int, ...]
    matrix: EvalMatrix
    rank: int


@dataclass(frozen=True)
class KappaValue:
    lam: SlWeight
    mu: GlWeight
    value: RatFun
    method: str


def weyl_dim(lam: SlWeight, at_q_one: bool = True) -> int | RatFun:
    """The (quantum) Weyl dimension of the irreducible of highest weight lam."""
    if not lam.is_dominant():
        raise NotDominant(f"{lam} is not dominant")
    n = lam.n
    if at_q_one:
        out = Fraction(1)
        for i in range(1, n):
            for j in range(i + 1, n + 1):
                from .weights import PositiveRoot

                out *= Fraction(pairing_A(lam, PositiveRoot(i, j)), j - i)
        assert out.denominator == 1
        return int(out)
    num, den = ONE, ONE
    from .weights import PositiveRoot

    for i in range(1, n):
        for j in range(i + 1, n + 1):
            num = num * qint(pairing_A(lam, PositiveRoot(i, j)))
            den = den * qint(j - i)
    return RatFun(num, den)


def _strip_prefix(basis_labels: tuple[int, ...], n: int) -> tuple[int, ...]:
    """Drop the leading block of 0/n labels; no 0/n may appear afterwards."""
    i = 0
    while i < len(basis_labels) and basis_labels[i] in (0, n):
        i += 1
    rest = basis_labels[i:]
    assert all(x not in (0, n) for x in rest), basis_labels
    return rest


def _strip_rows(mat: EvalMatrix) -> EvalMatrix:
    """Reindex away a prefix of trivial factors in the row basis (dimension 1
    each, so basis indices are unchanged)."""
    n = mat.rows.n
    stripped = TensorBasis(n, _strip_prefix(mat.rows.labels, n))
    assert stripped.dim == mat.rows.dim
    return EvalMatrix(stripped, mat.cols, mat._rows, mat.den)


def _strip_cols(mat: EvalMatrix) -> EvalMatrix:
    n = mat.cols.n
    stripped = TensorBasis(n, _strip_prefix(mat.cols.labels, n))
    assert stripped.dim == mat.cols.dim
    return EvalMatrix(mat.rows, stripped, mat._rows, mat.den)


def _trace_of_product(a: EvalMatrix, b: EvalMatrix) -> RatFun:
    """trace(a o b) without forming the product."""
    if a.cols.dim != b.rows.dim or a.rows.dim != b.cols.dim:
        raise InvalidInput("trace_of_product shape mismatch")
    acc = ZERO
    for i, row in a._rows.items():
        for j, v in row.items():
            w = b._rows.get(j, {}).get(i)
            if w is not None:
                acc = acc + v * w
    return RatFun(acc, a.den * b.den)


class ClaspContext:
    """Memoized clasp and kappa computations for a fixed rank n.

    The memo tables are lock-guarded; records are persisted as JSON files in
    the cache directory (written atomically) so CLI runs can share work.
    """

    def __init__(self, n: int, cache_dir: str | os.PathLike | None = None):
        if n < 2:
            raise UnsupportedRank(f"need n >= 2, got {n}")
        self.n = n
        if cache_dir is None:
            cache_dir = os.environ.get(CACHE_ENV_VAR) or DEFAULT_CACHE_DIR
        self.cache_dir = Path(cache_dir) if cache_dir != "" else None
        self._lock = threading.RLock()
        self._clasps: dict[tuple[int, ...], ClaspRecord] = {}
        self._kappa: dict[tuple, RatFun] = {}
        self._kappa_checked: set[tuple] = set()
        self._in_progress: set[tuple] = set()

    # -- weight helpers -------------------------------------------------

    def _check_rank(self, lam: SlWeight):
        if lam.n != self.n:
            raise InvalidInput(f"weight {lam} has rank {lam.n}, context has {self.n}")

    def add_mu(self, lam: SlWeight, mu: GlWeight) -> SlWeight:
        return lam + sl_coords(mu)

    # -- clasp construction ----------------------------------------------

    def clasp(self, lam: SlWeight) -> ClaspRecord:
        """The lam-clasp on canonical_sequence(lam), by the triple clasp
        expansion: peel off the last letter a, project with the smaller clasp,
        and subtract the correction through each lower summand weighted by the
        reciprocal local intersection form."""
        self._check_rank(lam)
        if not lam.is_dominant():
            raise NotDominant(f"{lam} is not dominant")
        key = lam.coords
        with self._lock:
            rec = self._clasps.get(key)
        if rec is not None:
            return rec
        rec = self._load_clasp(lam)
        if rec is None:
            rec = self._build_clasp(lam)
            self._save_clasp(rec)
        with self._lock:
            self._clasps[key] = rec
        return rec

    def _build_clasp(self, lam: SlWeight) -> ClaspRecord:
        n = self.n
        seq = canonical_sequence(lam)
        if len(seq) <= 1:
            mat = EvalMatrix.identity(TensorBasis(n, seq))
            return ClaspRecord(lam, seq, mat, mat.rows.dim)
        a = max(i + 1 for i, c in enumerate(lam.coords) if c > 0)
        lam_prev = lam - SlWeight.fundamental(a, n)
        prev = self.clasp(lam_prev)
        s0 = prev.sequence + (a,)
        base = prev.matrix.tensor_identity_right(a)
        acc = base
        for mu in omega_set(a, n):
            if mu.is_highest():
                continue
            target = self.add_mu(lam_prev, mu)
            if not target.is_dominant():
                continue
            term, kappa = self._correction_term(lam_prev, mu)
            if kappa.is_zero():
                raise DegenerateKappa(
                    f"kappa({lam_prev},{mu}) = 0; triple clasp expansion fails"
                )
            acc = acc.sub(term.scale(kappa.inverse())).reduced()
        # transport to the canonical sequence of lam (a no-op for the
        # largest-index pivot, where s0 is already weakly increasing)
        if s0 != seq:
            fwd = eval_ladder(neutral_sort(s0, seq, n))
            bwd = eval_ladder(neutral_sort(seq, s0, n))
            acc = fwd.compose(acc).compose(bwd).reduced()
        top = acc.rows.top_index()
        if acc.entry(top, top) != RatFun(ONE):
            raise AssertionError(f"clasp({lam}) has x_top entry {acc.entry(top, top)}")
        tr = acc.trace()
        if not tr.den.is_one() or (tr.num and set(tr.num.coeffs) != {0}):
            raise AssertionError(f"clasp({lam}) has non-constant trace {tr}")
        rank = tr.num.coeffs.get(0, 0)
        return ClaspRecord(lam, seq, acc, rank)

    def _tier_matrices(self, live: tuple[int, ...], mu: GlWeight) -> tuple[EvalMatrix, EvalMatrix]:
        """(T, Tbar): the evaluated light-ladder tier consuming a strand
        labeled mu.a on the live sequence, with trivial factors stripped,
        and its flip."""
        tier = light_tier(self.n, live, mu.a, mu)
        t_mat = _strip_rows(eval_ladder(tier))
        tbar_mat = _strip_cols(eval_ladder(flip(tier)))
        return t_mat, tbar_mat

    def _intersection_pair(self, lam: SlWeight, mu: GlWeight) -> tuple[EvalMatrix, EvalMatrix]:
        """E = P_{lam+mu} o tier_mu o (P_lam (x) id_a) and its dual Ebar."""
        target = self.add_mu(lam, mu)
        if not (lam.is_dominant() and target.is_dominant()):
            raise NotDominant(f"kappa({lam},{mu}) undefined: {target} not dominant")
        p_lam = self.clasp(lam)
        p_tgt = self.clasp(target)
        t_mat, tbar_mat = self._tier_matrices(p_lam.sequence, mu)
        a_mat = p_lam.matrix.tensor_identity_right(mu.a)
        e_mat = p_tgt.matrix.compose(t_mat).compose(a_mat).reduced()
        ebar_mat = a_mat.compose(tbar_mat).compose(p_tgt.matrix).reduced()
        return e_mat, ebar_mat

    def _correction_term(self, lam: SlWeight, mu: GlWeight) -> tuple[EvalMatrix, RatFun]:
        """(Ebar o E, kappa) computed with two large products, using clasp
        idempotency to collapse the doubled middle clasp:
        Ebar o E = (P (x) id) o Tbar o P_{lam+mu} o T o (P (x) id)."""
        target = self.add_mu(lam, mu)
        p_lam = self.clasp(lam)
        p_tgt = self.clasp(target)
        t_mat, tbar_mat = self._tier_matrices(p_lam.sequence, mu)
        a_mat = p_lam.matrix.tensor_identity_right(mu.a)
        u_mat = t_mat.compose(a_mat)
        v_mat = a_mat.compose(tbar_mat)
        term = v_mat.compose(p_tgt.matrix.compose(u_mat)).reduced()
        kappa = term.trace() / RatFun(LaurentPoly.const(p_tgt.rank))
        key = ("kappa", lam.coords, mu.bits)
        with self._lock:
            self._kappa.setdefault(key, kappa)
        self._save_kappa(lam, mu, kappa)
        return term, kappa

    # -- local intersection forms -----------------------------------------

    def kappa_matrix(
        self, lam: SlWeight, mu: GlWeight, check_proportional: bool = True
    ) -> RatFun:
        """kappa as the scalar by which E o Ebar acts on the (lam+mu)-clasp:
        trace(E o Ebar) / trace(P_{lam+mu}), with an entrywise proportionality
        assertion on demand."""
        self._check_rank(lam)
        key = ("kappa", lam.coords, mu.bits)
        with self._lock:
            cached = self._kappa.get(key)
            checked = key in self._kappa_checked
        if cached is not None and (not check_proportional or checked):
            return cached
        target = self.add_mu(lam, mu)
        if not (lam.is_dominant() and target.is_dominant()):
            raise NotDominant(f"kappa({lam},{mu}) undefined")
        p_lam = self.clasp(lam)
        p_tgt = self.clasp(target)
        t_mat, tbar_mat = self._tier_matrices(p_lam.sequence, mu)
        a_mat = p_lam.matrix.tensor_identity_right(mu.a)
        # E o Ebar = P_tgt o (T o A) o (A o Tbar) o P_tgt
        uv_mat = t_mat.compose(a_mat).compose(a_mat.compose(tbar_mat)).reduced()
        if check_proportional:
            prod = p_tgt.matrix.compose(uv_mat).compose(p_tgt.matrix).reduced()
            kappa = (
                prod.trace() / RatFun(LaurentPoly.const(p_tgt.rank))
                if cached is None
                else cached
            )
            if kappa.is_zero():
                raise DegenerateKappa(f"kappa({lam},{mu}) = 0")
            if not prod == p_tgt.matrix.scale(kappa):
                raise AssertionError(
                    f"E o Ebar is not kappa * clasp for ({lam},{mu})"
                )
        elif cached is None:
            # trace(P o UV o P) = trace(P o UV) using clasp idempotency
            kappa = _trace_of_product(p_tgt.matrix, uv_mat) / RatFun(
                LaurentPoly.const(p_tgt.rank)
            )
        else:
            kappa = cached
        if kappa.is_zero():
            raise DegenerateKappa(f"kappa({lam},{mu}) = 0")
        with self._lock:
            self._kappa[key] = kappa
            if check_proportional:
                self._kappa_checked.add(key)
        self._save_kappa(lam, mu, kappa)
        return kappa

    def kappa_conjecture(self, lam: SlWeight, mu: GlWeight) -> RatFun:
        """The conjectural product over inversion roots of [A]/[A-1]; the
        equivalent form with denominator [A(lam+mu, alpha)] is asserted equal."""
        self._check_rank(lam)
        target = self.add_mu(lam, mu)
        if not (lam.is_dominant() and target.is_dominant()):
            raise NotDominant(f"kappa({lam},{mu}) undefined")
        num, den, den2 = ONE, ONE, ONE
        for alpha in sorted(inversion_set(mu), key=lambda r: (r.i, r.j)):
            av = pairing_A(lam, alpha)
            num = num * qint(av)
            den = den * qint(av - 1)
            den2 = den2 * qint(pairing_A(target, alpha))
        value = RatFun(num, den)
        assert value == RatFun(num, den2), "main conjecture variants disagree"
        return value

    def kappa_recursive(self, lam: SlWeight, mu: GlWeight) -> RatFun:
        """kappa via the explicit recursion: peel the last 1-string of mu,
        multiply the smaller form by a quantum binomial, and subtract the
        gamma-weighted corrections. Only the ranks the recursion is worked out
        for (n <= 4) are supported."""
        if self.n > 4:
            raise UnsupportedRank("recursive kappa is available for n <= 4 only")
        self._check_rank(lam)
        target = self.add_mu(lam, mu)
        if not (lam.is_dominant() and target.is_dominant()):
            raise NotDominant(f"kappa({lam},{mu}) undefined")
        if mu.is_highest():
            return RatFun(ONE)
        key = ("kappa_rec", lam.coords, mu.bits)
        with self._lock:
            cached = self._kappa.get(key)
        if cached is not None:
            return cached
        guard = key
        if guard in self._in_progress:
            raise DegenerateKappa(f"kappa recursion cycle at ({lam},{mu})")
        self._in_progress.add(guard)
        try:
            value = self._kappa_recursive_inner(lam, mu)
        finally:
            self._in_progress.discard(guard)
        with self._lock:
            self._kappa[key] = value
        return value

    def _kappa_recursive_inner(self, lam: SlWeight, mu: GlWeight) -> RatFun:
        n = self.n
        data = elementary_data(mu)
        k = data.k
        xk = data.x[-1]
        lam_m = lam - SlWeight.fundamental(xk, n)
        if not lam_m.is_dominant():
            raise NotDominant(f"recursion step left the dominant cone at {lam_m}")
        # first term: strip the last 1-string of mu
        mu_minus_bits = list(mu.bits)
        for p in range(data.x[-1], data.y[-1]):
            mu_minus_bits[p] = 0
        alpha_k = data.alpha[k - 1]
        if alpha_k == 0:
            kappa_m = RatFun(ONE)
        else:
            kappa_m = self.kappa_recursive(lam_m, GlWeight(tuple(mu_minus_bits)))
        total = RatFun(qbinom(data.y[-1] - alpha_k, data.beta[-1])) * kappa_m
        omega_xk = SlWeight.fundamental(xk, n)
        for nu in omega_set(xk, n):
            if nu.is_highest():
                continue
            lam_mn = lam_m + sl_coords(nu)
            if not lam_mn.is_dominant():
                continue
            gamma = self._gamma_recursive(lam, mu, nu)
            if gamma.is_zero():
                continue
            sigma_bits = tuple(
                mb + hb - nb
                for mb, hb, nb in zip(
                    mu.bits, highest_weight(xk, n).bits, nu.bits
                )
            )
            if any(b not in (0, 1) for b in sigma_bits):
                continue
            sigma = GlWeight(sigma_bits)
            kappa_top = (
                RatFun(ONE)
                if sigma.is_highest()
                else self.kappa_recursive(lam_mn, sigma)
            )
            kappa_bot = self.kappa_recursive(lam_m, nu)
            total = total - (kappa_top / kappa_bot) * gamma * gamma
        return total

    def _gamma_recursive(self, lam: SlWeight, mu: GlWeight, nu: GlWeight) -> RatFun:
        """gamma values entering the kappa recursion, per the worked-out cases:
        1 whenever mu has a single counted 0-string (k = 1); for n = 4 and
        mu = (0101) the two remaining cases are 1 and [2] - 1/kappa."""
        n = self.n
        data = elementary_data(mu)
        xk = data.x[-1]
        sigma_bits = tuple(
            mb + hb - nb
            for mb, hb, nb in zip(mu.bits, highest_weight(xk, n).bits, nu.bits)
        )
        if any(b not in (0, 1) for b in sigma_bits):
            return RatFun(ZERO)
        if nu.is_highest():
            return RatFun(ONE)
        if data.k == 1:
            return RatFun(ONE)
        if n == 4 and mu.bits == (0, 1, 0, 1):
            if nu.bits == (1, 1, 0, 1):
                return RatFun(ONE)
            if nu.bits == (0, 1, 1, 1):
                value = RatFun(qint(2))
                tau = lam - SlWeight.fundamental(3, n) - SlWeight.fundamental(1, n)
                eta = GlWeight((0, 1, 0, 0))
                if tau.is_dominant() and (tau + sl_coords(eta)).is_dominant():
                    value = value - self.kappa_recursive(tau, eta).inverse()
                return value
            if nu.bits == (1, 0, 1, 1):
                return RatFun(ZERO)
        raise UnsupportedRank(
            f"no recursive gamma worked out for n={n}, mu={mu}, nu={nu}"
        )

    # -- gamma as a matrix computation -------------------------------------

    def gamma(self, lam: SlWeight, mu: GlWeight, nu: GlWeight) -> RatFun:
        """The coefficient of E_{lam-w_xk+nu, sigma} in the composite that
        feeds the flipped nu-tier through the (lam-w_xk)-clasp into the
        mu-tier, with clasps on both boundaries."""
        self._check_rank(lam)
        n = self.n
        if mu.is_highest() or mu.a == 0:
            raise InvalidInput("mu must be a non-highest weight with a 0-string")
        data = elementary_data(mu)
        xk = data.x[-1]
        if nu.a != xk or nu.n != n:
            raise InvalidInput(f"nu must lie in Omega({xk})")
        target = self.add_mu(lam, mu)
        lam_m = lam - SlWeight.fundamental(xk, n)
        if not (lam.is_dominant() and target.is_dominant() and lam_m.is_dominant()):
            raise NotDominant(f"gamma({lam},{mu},{nu}) needs dominant weights")
        lam_mn = lam_m + sl_coords(nu)
        if not lam_mn.is_dominant():
            raise NotDominant(f"{lam_mn} is not dominant")
        sigma_bits = tuple(
            mb + hb - nb
            for mb, hb, nb in zip(mu.bits, highest_weight(xk, n).bits, nu.bits)
        )
        if any(b not in (0, 1) for b in sigma_bits):
            return RatFun(ZERO)
        sigma = GlWeight(sigma_bits)
        a = mu.a

        p_tgt = self.clasp(target)
        p_m = self.clasp(lam_m)
        p_mn = self.clasp(lam_mn)
        seq_m = p_m.sequence

        _, tbar_nu = self._tier_matrices(seq_m, nu)
        tier_mu = light_tier(n, seq_m + (xk,), a, mu)
        t_mu = _strip_rows(eval_ladder(tier_mu))
        composite = (
            p_tgt.matrix
            .compose(t_mu)
            .compose(p_m.matrix.tensor_identity_right(xk).tensor_identity_right(a))
            .compose(tbar_nu.tensor_identity_right(a))
            .compose(p_mn.matrix.tensor_identity_right(a))
            .reduced()
        )
        t_sigma = _strip_rows(eval_ladder(light_tier(n, p_mn.sequence, a, sigma)))
        reference = (
            p_tgt.matrix.compose(t_sigma).compose(p_mn.matrix.tensor_identity_right(a))
        ).reduced()
        if composite.is_zero():
            return RatFun(ZERO)
        if reference.is_zero():
            raise DegenerateKappa(
                f"reference map E_({lam_mn},{sigma}) vanishes; gamma undefined"
            )
        i, row = next(iter(reference._rows.items()))
        j = next(iter(row))
        value = composite.entry(i, j) / reference.entry(i, j)
        if not composite == reference.scale(value):
            raise AssertionError(
                f"gamma composite is not proportional to E_sigma for ({lam},{mu},{nu})"
            )
        return value

    # -- oracle -------------------------------------------------------------

    def clasp_oracle(self, lam: SlWeight, width_bound: int = 8) -> EvalMatrix:
        """Solve for the clasp inside the double-ladder span of End(x_lam):
        annihilation by every non-full light ladder plus x_top normalization.

        Pivoting is guided by modular specializations of q, but the returned
        solution is verified symbolically against every constraint.
        """
        self._check_rank(lam)
        if not lam.is_dominant():
            raise NotDominant(f"{lam} is not dominant")
        n = self.n
        seq = canonical_sequence(lam)
        if len(seq) > width_bound:
            raise InvalidInput(f"width {len(seq)} exceeds bound {width_bound}")
        basis = TensorBasis(n, seq)
        paths = enumerate_paths(seq, n)
        pairs = [
            (e, f)
            for e in paths
            for f in paths
            if e.endpoint == f.endpoint
        ]
        mats = []
        for e, f in pairs:
            m = eval_ladder(double_ladder(e, f))
            m = _strip_rows(_strip_cols(m))
            assert m.rows.labels == seq and m.cols.labels == seq
            mats.append(m)
        nonfull = [p for p in paths if not p.is_full()]
        constraints = []  # sparse rows over the unknown coefficients
        light_mats = []
        for p in nonfull:
            lmat = _strip_rows(eval_ladder(light_ladder(seq, p)))
            light_mats.append(lmat)
            prods = [lmat.compose(m) for m in mats]
            cells: dict[tuple[int, int], dict[int, LaurentPoly]] = {}
            for kidx, prod in enumerate(prods):
                assert prod.den.is_one()
                for i, row in prod._rows.items():
                    for j, v in row.items():
                        cells.setdefault((i, j), {})[kidx] = v
            constraints.extend(cells.values())
        coeffs = _solve_unique_nullvector(constraints, len(mats))
        # normalize the x_top -> x_top coefficient to 1
        ti = basis.top_index()
        top_coeff = RatFun(ZERO)
        for c, m in zip(coeffs, mats):
            top_coeff = top_coeff + c * m.entry(ti, ti)
        if top_coeff.is_zero():
            raise NonUniqueSolution("solution has zero neutral coefficient")
        phi = EvalMatrix.zero(basis, basis)
        for c, m in zip(coeffs, mats):
            c = c / top_coeff
            if not c.is_zero():
                phi = phi.add(m.scale(c))
        phi = phi.reduced()
        for lmat in light_mats:
            if not lmat.compose(phi).is_zero():
                raise NonUniqueSolution("candidate fails a light-ladder constraint")
        return phi

    # -- sweeps ---------------------------------------------------------------

    def conjecture_sweep(
        self,
        level_bound: int,
        check_proportional: bool = True,
        include_recursive: bool | None = None,
        mu_filter=None,
        progress=None,
    ) -> list[dict]:
        """Compare kappa_matrix, kappa_conjecture (and kappa_recursive when
        available) for every dominant lam with level <= level_bound and every
        mu with lam + mu dominant. Returns sorted report rows."""
        if include_recursive is None:
            include_recursive = self.n <= 4
        rows = []
        for lam in dominant_weights_up_to(self.n, level_bound):
            for a in range(1, self.n):
                for mu in omega_set(a, self.n):
                    if mu_filter is not None and not mu_filter(lam, mu):
                        continue
                    if not self.add_mu(lam, mu).is_dominant():
                        continue
                    if progress:
                        progress(lam, mu)
                    km = self.kappa_matrix(lam, mu, check_proportional=check_proportional)
                    kc = self.kappa_conjecture(lam, mu)
                    row = {
                        "n": self.n,
                        "lambda": str(lam),
                        "mu": str(mu),
                        "kappa_matrix": str(km),
                        "kappa_conjecture": str(kc),
                        "kappa_recursive": "",
                        "agree": km == kc,
                    }
                    if include_recursive:
                        kr = self.kappa_recursive(lam, mu)
                        row["kappa_recursive"] = str(kr)
                        row["agree"] = row["agree"] and kr == km
                    rows.append(row)
        rows.sort(key=lambda r: (r["lambda"], r["mu"]))
        return rows

    # -- persistence ------------------------------------------------------------

    def _clasp_path(self, lam: SlWeight) -> Path | None:
        if self.cache_dir is None:
            return None
        name = "clasp_n%d_%s.json" % (self.n, "_".join(map(str, lam.coords)))
        return self.cache_dir / name

    def _kappa_path(self, lam: SlWeight, mu: GlWeight) -> Path | None:
        if self.cache_dir is None:
            return None
        name = "kappa_n%d_%s__%s.json" % (
            self.n,
            "_".join(map(str, lam.coords)),
            str(mu),
        )
        return self.cache_dir / name

    def _load_clasp(self, lam: SlWeight) -> ClaspRecord | None:
        path = self._clasp_path(lam)
        if path is None or not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
            if data.get("version") != CACHE_VERSION or data.get("n") != self.n:
                return None
            seq = tuple(data["sequence"])
            basis = TensorBasis(self.n, seq)
            den = LaurentPoly.from_json(data["den"])
            rows: dict[int, dict[int, LaurentPoly]] = {}
            for i, j, poly in data["entries"]:
                rows.setdefault(i, {})[j] = LaurentPoly.from_json(poly)
            mat = EvalMatrix(basis, basis, rows, den)
            return ClaspRecord(lam, seq, mat, int(data["rank"]))
        except (KeyError, ValueError, json.JSONDecodeError):
            return None

    def _save_clasp(self, rec: ClaspRecord):
        path = self._clasp_path(rec.lam)
        if path is None:
            return
        data = {
            "version": CACHE_VERSION,
            "n": self.n,
            "lambda": list(rec.lam.coords),
            "sequence": list(rec.sequence),
            "rank": rec.rank,
            "den": rec.matrix.den.to_json(),
            "entries": [
                [i, j, rec.matrix._rows[i][j].to_json()]
                for i in sorted(rec.matrix._rows)
                for j in sorted(rec.matrix._rows[i])
            ],
        }
        _atomic_write_json(path, data)

    def _save_kappa(self, lam: SlWeight, mu: GlWeight, value: RatFun):
        path = self._kappa_path(lam, mu)
        if path is None:
            return
        _atomic_write_json(
            path,
            {
                "version": CACHE_VERSION,
                "n": self.n,
                "lambda": list(lam.coords),
                "mu": str(mu),
                "value": value.to_json(),
            },
        )


def _atomic_write_json(path: Path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# Exact nullspace of a sparse over-determined system with polynomial entries
# ---------------------------------------------------------------------------

_SOLVER_PRIME = (1 << 61) - 1


def _solve_unique_nullvector(
    rows: list[dict[int, LaurentPoly]], ncols: int, attempts: int = 4
) -> list[RatFun]:
    """The one-dimensional nullspace of the stacked constraint rows.

    Rows are pre-filtered by a modular specialization of q to find a small
    spanning subset; the nullvector is then computed and verified exactly.
    Raises NonUniqueSolution when the nullity is not 1.
    """
    if ncols == 0:
        raise NonUniqueSolution("no unknowns")
    rng = random.Random(12345)
    last_error = None
    for _ in range(attempts):
        t = rng.randrange(2, _SOLVER_PRIME - 2)
        selected, mod_rank = _modular_prefilter(rows, ncols, t)
        if mod_rank < ncols - 1:
            last_error = NonUniqueSolution(
                f"modular nullity {ncols - mod_rank} > 1; clasp solve is degenerate"
            )
            continue
        if mod_rank == ncols:
            raise NonUniqueSolution("constraints admit only the zero solution")
        vec = _exact_nullvector(selected, ncols)
        if vec is None:
            last_error = NonUniqueSolution("exact elimination found no nullvector")
            continue
        if _verify_nullvector(rows, vec):
            return vec
        last_error = NonUniqueSolution("modular pivoting was unlucky")
    raise last_error or NonUniqueSolution("failed to solve")


def _eval_mod(poly: LaurentPoly, t: int, p: int = _SOLVER_PRIME) -> int:
    acc = 0
    for e, c in poly.coeffs.items():
        acc = (acc + c * pow(t, e % (p - 1), p)) % p
    return acc


def _modular_prefilter(
    rows: list[dict[int, LaurentPoly]], ncols: int, t: int
) -> tuple[list[dict[int, LaurentPoly]], int]:
    """Greedy mod-p row selection: keep rows that increase the modular rank."""
    p = _SOLVER_PRIME
    pivots: dict[int, dict[int, int]] = {}  # pivot col -> reduced row
    selected: list[dict[int, LaurentPoly]] = []
    for row in rows:
        mrow = {k: v for k, v in ((k, _eval_mod(v, t)) for k, v in row.items()) if v}
        for col in sorted(pivots):
            c = mrow.get(col)
            if c:
                prow = pivots[col]
                factor = c * pow(prow[col], p - 2, p) % p
                for k2, v2 in prow.items():
                    nv = (mrow.get(k2, 0) - factor * v2) % p
                    if nv:
                        mrow[k2] = nv
                    else:
                        mrow.pop(k2, None)
        if mrow:
            pivots[min(mrow)] = mrow
            selected.append(row)
            if len(pivots) == ncols:
                break
    return selected, len(pivots)


def _exact_nullvector(
    rows: list[dict[int, LaurentPoly]], ncols: int
) -> list[RatFun] | None:
    """Gaussian elimination over Q(q) on a small system, returning a spanning
    nullvector when the rank is exactly ncols - 1."""
    dense = [
        [RatFun(r.get(j, ZERO)) for j in range(ncols)] for r in rows
    ]
    pivot_cols: list[int] = []
    rank = 0
    for col in range(ncols):
        pr = None
        for r in range(rank, len(dense)):
            if not dense[r][col].is_zero():
                pr = r
                break
        if pr is None:
            continue
        dense[rank], dense[pr] = dense[pr], dense[rank]
        pivot = dense[rank][col]
        dense[rank] = [x / pivot for x in dense[rank]]
        for r in range(len(dense)):
            if r != rank and not dense[r][col].is_zero():
                factor = dense[r][col]
                dense[r] = [
                    x - factor * y for x, y in zip(dense[r], dense[rank])
                ]
        pivot_cols.append(col)
        rank += 1
    if rank != ncols - 1:
        return None
    free = next(j for j in range(ncols) if j not in pivot_cols)
    vec = [RatFun(ZERO)] * ncols
    vec[free] = RatFun(ONE)
    for row_idx, col in enumerate(pivot_cols):
        vec[col] = -dense[row_idx][free]
    return vec


def _verify_nullvector(rows: list[dict[int, LaurentPoly]], vec: list[RatFun]) -> bool:
    for row in rows:
        acc = RatFun(ZERO)
        for k, v in row.items():
            if not vec[k].is_zero():
                acc = acc + vec[k] * RatFun(v)
        if not acc.is_zero():
            return False
    return True
