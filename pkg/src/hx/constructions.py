"""Lower-bound constructions: deletion-method graphs, the private-vertex lift,
k-shadows, and the packed assembly, with end-to-end cancellative and
union-free pipelines that verify every hypothesis they rely on.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, log

from . import properties as props
from .bounds import density_ratio
from .core import Hypergraph, PackingRecord, ksubsets, to_mask, vertices_of
from .errors import BadParameters, HypothesisFailed, RetriesExhausted, ShadowMismatch, UniformityMismatch
from .packing import DEFAULT_PATIENCE, DIRECT, audit_packing, default_epsilon, greedy_conflict_free_packing
from .rng import derive_seed, seed_substream

DEFAULT_RETRIES = 5


def _colex_unrank(rank: int, r: int) -> int:
    """The ``rank``-th r-subset of the naturals in colex order, as a mask."""
    mask = 0
    c = r - 1
    while comb(c + 1, r) <= rank:
        c += 1
    for i in range(r, 0, -1):
        while comb(c, i) > rank:
            c -= 1
        mask |= 1 << c
        rank -= comb(c, i)
        c -= 1
    return mask


def _sample_rsets(m: int, r: int, p: float, rng) -> list[int]:
    """Each r-subset of [m] independently with probability ``p`` (geometric skipping)."""
    total = comb(m, r)
    if p >= 1:
        return [_colex_unrank(i, r) for i in range(total)]
    out = []
    logq = log(1.0 - p)
    idx = -1
    while True:
        idx += int(log(1.0 - rng.random()) / logq) + 1
        if idx >= total:
            return out
        out.append(_colex_unrank(idx, r))


def deletion_probability(m: int, r: int, k: int, e: int) -> float:
    return min(1.0, 0.5 * m ** (k + 1 / (e - 1) - r))


def delete_minus_configurations(edges: list[int], r: int, k: int, e: int) -> list[int]:
    """For ell = 2..e, delete the colex-largest edge of every surviving bad ell-tuple."""
    edges = sorted(edges)
    for ell in range(2, e + 1):
        v = props.ell_minus_threshold(r, k, ell)
        alive = [True] * len(edges)
        for tup in props.iter_ve_configurations(edges, v, ell):
            if all(alive[i] for i in tup):
                alive[max(tup)] = False
        edges = [x for x, keep in zip(edges, alive) if keep]
    return edges


def random_ell_minus_free(m: int, r: int, k: int, e: int, seed: int = 0, retries: int = DEFAULT_RETRIES,
                          floor: int = 1, info: dict | None = None) -> Hypergraph:
    """Sample-and-delete an r-graph on [m] that is ell-minus-free for every 2 <= ell <= e.

    Each attempt draws r-sets with probability ``1/2 m^(k + 1/(e-1) - r)``
    from its own substream and deletes one edge per bad tuple.  An attempt
    keeping fewer than ``floor`` edges is retried; ``info`` (if given)
    receives the attempt count and sampled/surviving sizes.
    """
    if not (r > k >= 2 and e >= 2 and m >= r):
        raise BadParameters(f"need r > k >= 2, e >= 2, m >= r; got m={m}, r={r}, k={k}, e={e}")
    p = deletion_probability(m, r, k, e)
    best = None
    history = []
    for attempt in range(retries):
        rng = seed_substream(seed, "ell-minus-free", "sample", attempt)
        sampled = _sample_rsets(m, r, p, rng)
        kept = delete_minus_configurations(sampled, r, k, e)
        g = Hypergraph(m, r, tuple(kept))
        history.append({"attempt": attempt, "sampled": len(sampled), "kept": len(kept)})
        if best is None or len(g) > len(best):
            best = g
        if len(g) >= min(floor, comb(m, r)):
            if info is not None:
                info.update(p=p, attempts=attempt + 1, history=history)
            return g
    if info is not None:
        info.update(p=p, attempts=retries, history=history)
    raise RetriesExhausted(f"no attempt kept {floor} edges", best=best)


def estimate_c_hat(r: int, k: int, e: int, sizes=(8, 10, 12), seed: int = 0) -> Fraction:
    """Mean of |G| / m^(k + 1/(e-1)) over pilot deletion-method runs."""
    ratios = []
    for m in sizes:
        if m < r:
            continue
        g = random_ell_minus_free(m, r, k, e, seed=derive_seed(seed, "pilot", m), floor=0)
        ratios.append(len(g) / m ** (k + 1 / (e - 1)))
    if not ratios or max(ratios) == 0:
        raise BadParameters("pilot runs produced no edges; cannot estimate c_hat")
    return Fraction(sum(ratios) / len(ratios)).limit_denominator(10**6)


def lift_to_F(g: Hypergraph, t: int, k: int) -> Hypergraph:
    """Extend edge i (colex order) of the (tk-1)-graph ``g`` by the fresh vertex ``g.n + i``."""
    if g.r != t * k - 1:
        raise UniformityMismatch(f"expected a {t * k - 1}-graph, got r={g.r}")
    n = g.n + len(g)
    return Hypergraph.from_masks((e | 1 << (g.n + i) for i, e in enumerate(g.edges)), n, g.r + 1)


def k_shadow(f: Hypergraph, k: int) -> Hypergraph:
    if not 1 <= k <= f.r:
        raise BadParameters(f"need 1 <= k <= r={f.r}, got k={k}")
    return Hypergraph(f.n, k, tuple(sorted({T for e in f.edges for T in ksubsets(e, k)})))


def _as_fraction(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


def choose_m0(t: int, k: int, epsilon, c_hat, e: int | None = None) -> int:
    """Smallest m0 >= tk with 1/(m0^(-1/(e-1))/c + B) >= (1 - eps/2)/B, B = C(tk-1,k-1).

    ``e`` defaults to 2t (the cancellative horizon; the union-free one is
    2t+2).  Solving for m0 gives ``m0 >= ((2 - eps) / (c B eps))^(e-1)``,
    which is evaluated exactly.
    """
    eps = _as_fraction(epsilon)
    c = _as_fraction(c_hat)
    e = 2 * t if e is None else e
    if not 0 < eps < 1 or c <= 0 or t < 1 or k < 1 or e < 2:
        raise BadParameters(f"need 0 < epsilon < 1, c_hat > 0, e >= 2; got epsilon={eps}, c_hat={c}, e={e}")
    B = comb(t * k - 1, k - 1)
    bound = ((2 - eps) / (c * B * eps)) ** (e - 1)
    return max(t * k, math.ceil(bound))


def assemble_HF(f: Hypergraph, p: PackingRecord) -> Hypergraph:
    """Place a copy of ``f`` on every packed shadow copy and take the union."""
    shadow = k_shadow(f, p.k)
    if p.template.n != f.n:
        raise ShadowMismatch(f"template has {p.template.n} vertices, F has {f.n}")
    out = set()
    for idx, c in enumerate(p.copies):
        image = tuple(sorted(to_mask(c.bijection[v] for v in vertices_of(T)) for T in shadow.edges))
        if image != tuple(sorted(c.edges)):
            raise ShadowMismatch(f"copy {idx} is not the shadow image under its bijection")
        for e in f.edges:
            out.add(to_mask(c.bijection[v] for v in vertices_of(e)))
    if len(out) != len(p.copies) * len(f):
        raise ShadowMismatch("copies of F overlap; the packing is not edge-disjoint")
    return Hypergraph(p.n, f.r, tuple(sorted(out)))


# ---------------------------------------------------------------- pipelines

@dataclass
class ConstructionParams:
    t: int
    k: int
    n: int
    m0: int | None = None
    e: int | None = None
    epsilon: Fraction | None = None
    seed: int = 0
    strategy: str = DIRECT
    packing_budget: int = 20_000
    packing_patience: int | None = DEFAULT_PATIENCE
    packing_epsilon: Fraction | None = None
    c_hat: Fraction | None = None
    exhaustive_budget: int = 10**8
    sample_tuples: int = 10**6
    retries: int = DEFAULT_RETRIES

    def validate(self, kind: str) -> None:
        if self.t < 2 or self.k < 2:
            raise BadParameters(f"need t >= 2 and k >= 2, got t={self.t}, k={self.k}")
        want = 2 * self.t if kind == "cancellative" else 2 * self.t + 2
        if self.e is None:
            self.e = want
        if self.e != want:
            raise BadParameters(f"{kind} pipeline requires e = {want}, got {self.e}")
        if self.m0 is None and self.epsilon is None:
            raise BadParameters("give either m0 or epsilon")
        if self.m0 is not None and self.m0 < self.t * self.k:
            raise BadParameters(f"m0 must be >= tk = {self.t * self.k}")
        if self.epsilon is not None and not 0 < _as_fraction(self.epsilon) < 1:
            raise BadParameters("epsilon must lie in (0, 1)")


@dataclass
class PipelineReport:
    kind: str
    params: dict
    sizes: dict = field(default_factory=dict)
    density_ratio: Fraction = Fraction(0)
    verdicts: dict = field(default_factory=dict)
    verification: str = ""
    seed: int = 0
    retries: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["density_ratio"] = [self.density_ratio.numerator, self.density_ratio.denominator]
        d["params"] = {key: ([v.numerator, v.denominator] if isinstance(v, Fraction) else v)
                       for key, v in self.params.items()}
        return d


@dataclass
class PipelineResult:
    H: Hypergraph
    report: PipelineReport
    G: Hypergraph
    F: Hypergraph
    shadow: Hypergraph
    packing: PackingRecord

    def __iter__(self):
        # unpacks as (H, report)
        return iter((self.H, self.report))


def _sampled_cancellative(h: Hypergraph, t: int, samples: int, rng) -> bool:
    size = len(h)
    if size < t + 2:
        return True
    E = h.edges
    for _ in range(samples):
        idx = rng.sample(range(size), t + 2)
        u = 0
        for i in idx[2:]:
            u |= E[i]
        if u | E[idx[0]] == u | E[idx[1]]:
            return False
    return True


def _sampled_union_free(h: Hypergraph, t: int, samples: int, rng) -> bool:
    size = len(h)
    E = h.edges
    for _ in range(samples):
        a = rng.sample(range(size), rng.randint(1, min(t, size)))
        b = rng.sample(range(size), rng.randint(1, min(t, size)))
        if set(a) != set(b):
            ua = vb = 0
            for i in a:
                ua |= E[i]
            for i in b:
                vb |= E[i]
            if ua == vb:
                return False
    return True


def _build(kind: str, params: ConstructionParams) -> PipelineResult:
    params.validate(kind)
    t, k, n, e = params.t, params.k, params.n, params.e
    report = PipelineReport(kind, {key: v for key, v in asdict(params).items()}, seed=params.seed)
    r_g = t * k - 1

    m0 = params.m0
    if m0 is None:
        c_hat = params.c_hat or estimate_c_hat(r_g, k, e, seed=params.seed)
        m0 = choose_m0(t, k, params.epsilon, c_hat, e)
        report.notes.append(f"m0={m0} chosen from epsilon={params.epsilon} and c_hat={c_hat}")
        report.params["c_hat"] = c_hat
    report.params["m0"] = m0

    g_info: dict = {}
    G = random_ell_minus_free(m0, r_g, k, e, seed=derive_seed(params.seed, "stage", "G"),
                              retries=params.retries, info=g_info)
    report.retries["G"] = g_info["attempts"] - 1
    F_lifted = lift_to_F(G, t, k)
    F, _ = F_lifted.compact()
    m = F.n
    J = k_shadow(F, k)
    report.sizes.update(G=len(G), F=len(F), J=len(J), m=m)

    if kind == "cancellative":
        f_ok = props.is_t_cancellative(F, 2 * (t - 1)).holds
    else:
        f_ok = props.is_t_union_free(F, t + 1).holds
    f_free = props.is_ell_minus_free_upto(F, k, e).holds
    report.verdicts["F_property"] = f_ok
    report.verdicts["F_ell_minus_free"] = f_free
    if not (f_ok and f_free):
        raise HypothesisFailed("the lifted family violates its required properties")

    pack_eps = params.packing_epsilon if params.packing_epsilon is not None else default_epsilon(m, k)
    if m > k and not Fraction(pack_eps) < Fraction(1, 2 * (m - k)):
        report.notes.append(f"packing epsilon {pack_eps} lies outside (0, 1/(2(m-k)))")

    P = None
    for attempt in range(params.retries):
        P = greedy_conflict_free_packing(J, n, k, e, pack_eps, params.strategy,
                                         seed=derive_seed(params.seed, "stage", "packing", attempt),
                                         budget=params.packing_budget, patience=params.packing_patience)
        audit = audit_packing(P, e) if len(P) else {"induced": True, "vertex_sets_minus_free": True}
        report.retries["packing"] = attempt
        if all(audit.values()):
            break
    else:
        raise HypothesisFailed("packing audit failed on every attempt")
    report.verdicts["P_induced"] = audit["induced"]
    report.verdicts["V_ell_minus_free"] = audit["vertex_sets_minus_free"]
    report.sizes["P"] = len(P)

    H = assemble_HF(F, P) if len(P) else Hypergraph(n, t * k, ())
    report.sizes["H"] = len(H)
    report.density_ratio = density_ratio(H, n, t, k)
    report.verdicts["H_ell_minus_free"] = props.is_ell_minus_free_upto(H, k, e).holds

    size = len(H)
    rng = seed_substream(params.seed, "stage", "verify")
    if kind == "cancellative":
        tt = 2 * (t - 1)
        work = comb(size, 2) * comb(max(size - 2, 0), tt)
        if work <= params.exhaustive_budget:
            report.verdicts["H_cancellative"] = props.is_t_cancellative(H, tt).holds
            report.verification = "verified-exhaustive"
        else:
            report.verdicts["H_cancellative"] = _sampled_cancellative(H, tt, params.sample_tuples, rng)
            report.verification = "verified-sufficient-conditions+sampled"
    else:
        report.verdicts["H_cover_free"] = props.is_t_cover_free(H, t).holds
        work = sum(comb(size, j) for j in range(1, t + 2))
        if work <= params.exhaustive_budget:
            report.verdicts["H_union_free"] = props.is_t_union_free(H, t + 1).holds
            report.verification = "verified-exhaustive"
        else:
            report.verdicts["H_union_free"] = _sampled_union_free(H, t + 1, params.sample_tuples, rng)
            report.verification = "verified-sufficient-conditions+sampled"
    if P.flags.get("budget_exhausted"):
        report.notes.append("packing stopped at its sampling budget")
    return PipelineResult(H, report, G, F, J, P)


def build_cancellative(params: ConstructionParams) -> PipelineResult:
    """Assemble a 2(t-1)-cancellative tk-graph on [n] from an induced shadow packing."""
    return _build("cancellative", params)


def build_union_free(params: ConstructionParams) -> PipelineResult:
    """Assemble a t-cover-free, (t+1)-union-free tk-graph on [n]."""
    return _build("union-free", params)
