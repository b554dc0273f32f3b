"""Planted overlapping-community instances with ground truth."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GenerationInfeasibleError, InvalidParamsError
from .graph import Graph, NodeSet, RngStream

MODELS = ("clique", "dense", "affinity", "anysize-clique", "anysize-dense", "sparse")
AMBIENTS = ("none", "uniform", "gap-stress")
SIMILAR = ("clique", "dense", "affinity")
ANY_SIZE = ("anysize-clique", "anysize-dense")
# long aliases accepted by the library entry points
_ALIASES = {"clique-similar": "clique", "dense-similar": "dense", "affinity-similar": "affinity",
            "any-size-clique": "anysize-clique", "any-size-dense": "anysize-dense"}
# safety factor on the ambient rate derived from gamma
AMBIENT_MARGIN = 0.5
_ROW_BLOCK = 256


@dataclass
class ModelParams:
    """Model symbols plus generator-only knobs.

    ``num_communities`` communities are planted. With ``overlap`` set they
    form a chain in which consecutive communities share that many nodes;
    otherwise members are drawn at random among nodes with spare capacity.
    ``ambient_q`` is the requested ambient edge rate (lowered when it would
    break the gamma bound). ``stress_nodes`` outsiders are wired into
    community 0 by the gap-stress strategy.
    """

    n: int = 0
    k: Optional[int] = None
    m: Optional[int] = None
    d: int = 1
    delta: float = 1.0
    epsilon: Optional[float] = None
    gamma: float = 1.0
    alpha: Optional[float] = None
    alpha_min: Optional[float] = None
    beta: Optional[float] = None
    b: Optional[float] = None
    num_communities: int = 1
    overlap: Optional[int] = None
    ambient_q: float = 0.0
    stress_nodes: int = 0
    max_attempts: int = 100

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


@dataclass
class GroundTruth:
    """Planted communities; ``affinities[i][j]`` belongs to ``communities[i][j]``."""

    communities: list
    affinities: list
    model: str = "clique"
    ambient_edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    stress_nodes: tuple = ()

    def affinity(self, node: int, community: int) -> float:
        c = self.communities[community]
        j = int(np.searchsorted(np.asarray(c), node))
        if j >= len(c) or c[j] != node:
            raise KeyError((node, community))
        return float(self.affinities[community][j])

    def alpha_floor(self, community: int) -> float:
        """Density floor of a community: smallest squared affinity of its members."""
        a = self.affinities[community]
        if len(a) == 0:
            return 1.0
        return round(float(np.min(np.asarray(a, dtype=float) ** 2)), 12)

    def membership_counts(self, n: int) -> np.ndarray:
        cnt = np.zeros(n, dtype=np.int64)
        for c in self.communities:
            cnt[list(c)] += 1
        return cnt

    def shared_matrix(self, n: int) -> np.ndarray:
        """Boolean ``n x n`` matrix marking pairs that share a community."""
        s = np.zeros((n, n), dtype=bool)
        for c in self.communities:
            idx = np.asarray(c, dtype=np.int64)
            s[np.ix_(idx, idx)] = True
        np.fill_diagonal(s, False)
        return s


@dataclass
class AmbientSpec:
    strategy: str = "none"
    q: float = 0.0
    stress_nodes: int = 0
    target: int = 0

    def __post_init__(self):
        if self.strategy not in AMBIENTS:
            raise InvalidParamsError(f"unknown ambient strategy {self.strategy!r}")


def canonical_model(model: str) -> str:
    model = _ALIASES.get(model, model)
    if model not in MODELS:
        raise InvalidParamsError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    return model


def check_params(params: ModelParams, model: str) -> None:
    p = params
    if p.n < 0 or p.k is None or p.k < 1:
        raise InvalidParamsError("need n >= 0 and k >= 1")
    if p.d < 1:
        raise InvalidParamsError("need d >= 1")
    if not 0 < p.delta <= 1 or p.delta * p.k < 1:
        raise InvalidParamsError("need 0 < delta <= 1 and delta*k >= 1")
    if not 0 < p.gamma <= 1:
        raise InvalidParamsError("need 0 < gamma <= 1")
    if p.num_communities < 0:
        raise InvalidParamsError("num_communities must be >= 0")
    if model in ("dense", "affinity"):
        if p.alpha is None or not 0 < p.alpha <= 1:
            raise InvalidParamsError("need 0 < alpha <= 1")
        if p.epsilon is not None and not 0 < p.epsilon < p.alpha:
            raise InvalidParamsError("need 0 < epsilon < alpha")
    if model in ANY_SIZE:
        if p.m is None or not 1 <= p.m <= p.k:
            raise InvalidParamsError("need 1 <= m <= k")
    if model == "anysize-dense" and (p.alpha_min is None or not 0 < p.alpha_min <= 1):
        raise InvalidParamsError("need 0 < alpha_min <= 1")
    if model == "sparse":
        if p.b is None or p.b <= 10:
            raise InvalidParamsError("sparse model needs B > 10")
        if p.b > math.sqrt(p.k):
            raise InvalidParamsError("sparse model needs k >= B^2 so that B/sqrt(k) <= 1")
    if p.overlap is not None and p.overlap < 0:
        raise InvalidParamsError("overlap must be >= 0")


# memberships -------------------------------------------------------------

def _sizes(params: ModelParams, model: str, gen: np.random.Generator) -> list[int]:
    k, c = params.k, params.num_communities
    if model == "sparse":
        return [k] * c
    if model in ANY_SIZE:
        lo, hi = math.log(params.m), math.log(k)
        return [int(min(k, max(params.m, round(math.exp(x))))) for x in gen.uniform(lo, hi, size=c)]
    lo = math.ceil(params.delta * k - 1e-9)
    return [int(x) for x in gen.integers(lo, k + 1, size=c)]


def _chain(n, sizes, overlap, gen):
    perm = gen.permutation(n)
    comms, start = [], 0
    for s in sizes:
        if overlap >= s:
            raise GenerationInfeasibleError(f"overlap {overlap} not below community size {s}")
        if start + s > n:
            raise GenerationInfeasibleError("chain layout does not fit in n nodes")
        comms.append(tuple(sorted(int(x) for x in perm[start:start + s])))
        start += s - overlap
    return comms


def _scatter(n, d, sizes, gen):
    count = np.zeros(n, dtype=np.int64)
    comms = []
    for s in sizes:
        free = np.nonzero(count < d)[0]
        if free.size < s:
            return None
        pick = np.sort(gen.choice(free, size=s, replace=False))
        count[pick] += 1
        comms.append(tuple(int(x) for x in pick))
    return comms


def _intersection_ok(comms, limit):
    sets = [set(c) for c in comms]
    return all(len(a & b) <= limit for i, a in enumerate(sets) for b in sets[i + 1:])


def plant_memberships(params: ModelParams, model: str, rng: RngStream) -> list[NodeSet]:
    """Community node sets honouring the size band, the overlap bound ``d``,
    and for the sparse model the pairwise intersection bound ``k/(20 d^2)``.

    Layouts violating a constraint are redrawn up to ``max_attempts`` times.
    """
    model = canonical_model(model)
    check_params(params, model)
    gen = rng.gen
    n, d = params.n, params.d
    limit = params.k / (20 * d * d)
    for _ in range(params.max_attempts):
        sizes = _sizes(params, model, gen)
        if sum(sizes) > n * d:
            raise GenerationInfeasibleError(
                f"total membership demand {sum(sizes)} exceeds n*d = {n * d}")
        if params.overlap is not None:
            comms = _chain(n, sizes, params.overlap, gen)
        else:
            comms = _scatter(n, d, sizes, gen)
            if comms is None:
                continue
        cnt = np.zeros(n, dtype=np.int64)
        for c in comms:
            cnt[list(c)] += 1
        if cnt.size and cnt.max() > d:
            raise GenerationInfeasibleError("layout puts a node in more than d communities")
        if model == "sparse" and not _intersection_ok(comms, limit):
            continue
        return comms
    raise GenerationInfeasibleError(
        f"no valid community layout after {params.max_attempts} attempts")


def assign_affinities(comms, params: ModelParams, model: str, rng: RngStream) -> list[np.ndarray]:
    gen = rng.gen
    out = []
    for c in comms:
        s = len(c)
        if model in ("clique", "anysize-clique"):
            a = np.ones(s)
        elif model == "dense":
            a = np.full(s, math.sqrt(params.alpha))
        elif model == "affinity":
            a = gen.uniform(math.sqrt(params.alpha), 1.0, size=s)
        elif model == "anysize-dense":
            a = np.full(s, math.sqrt(gen.uniform(params.alpha_min, 1.0)))
        else:
            a = np.full(s, math.sqrt(params.b / math.sqrt(params.k)))
        out.append(a)
    return out


# realisation --------------------------------------------------------------

def edge_probabilities(n: int, comms, affinities) -> np.ndarray:
    """Pair probabilities: the largest ``p_u p_v`` over shared communities."""
    prob = np.zeros((n, n))
    for c, a in zip(comms, affinities):
        idx = np.asarray(c, dtype=np.int64)
        block = np.outer(a, a)
        prob[np.ix_(idx, idx)] = np.maximum(prob[np.ix_(idx, idx)], block)
    np.fill_diagonal(prob, 0.0)
    return prob


def _draw_upper(n: int, prob_row, gen) -> list:
    """One uniform per pair ``u < v`` in row-major order; keep pairs below ``prob``."""
    edges = []
    for start in range(0, n, _ROW_BLOCK):
        for u in range(start, min(n, start + _ROW_BLOCK)):
            if u + 1 >= n:
                continue
            r = gen.random(n - u - 1)
            p = prob_row(u)
            hit = np.nonzero(r < p)[0] + u + 1
            edges.extend((u, int(v)) for v in hit)
    return edges


def tuned_ambient_rate(q: float, params: ModelParams, prob: np.ndarray, shared: np.ndarray) -> float:
    """Largest rate <= ``q`` keeping every member's expected ambient degree at most
    ``AMBIENT_MARGIN * (1 - gamma)/gamma`` times its expected community degree."""
    if q <= 0:
        return 0.0
    members = shared.any(axis=1)
    if not members.any():
        return float(q)
    exp_comm = prob.sum(axis=1)[members]
    free = (params.n - 1 - shared.sum(axis=1))[members]
    ratio = AMBIENT_MARGIN * (1 - params.gamma) / params.gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        caps = np.where(free > 0, ratio * exp_comm / np.maximum(free, 1), np.inf)
    return float(min(q, caps.min()))


def realize_graph(truth: GroundTruth, params: ModelParams, ambient: AmbientSpec,
                  rng: RngStream) -> tuple[Graph, dict]:
    n = params.n
    comms, aff = truth.communities, truth.affinities
    prob = edge_probabilities(n, comms, aff)
    shared = prob > 0
    for c in comms:
        idx = np.asarray(c, dtype=np.int64)
        shared[np.ix_(idx, idx)] = True
    np.fill_diagonal(shared, False)
    info: dict = {"ambient": ambient.strategy}
    if truth.model == "sparse" and ambient.strategy != "none":
        raise InvalidParamsError("the sparse model has no ambient edges")
    edges = _draw_upper(n, lambda u: prob[u, u + 1:], rng.child(0).gen)
    ambient_edges: list = []
    stress: tuple = ()
    if ambient.strategy == "uniform":
        q = tuned_ambient_rate(ambient.q, params, prob, shared)
        info["q_requested"] = ambient.q
        info["q"] = q
        if q > 0:
            ambient_edges = _draw_upper(
                n, lambda u: np.where(shared[u, u + 1:], 0.0, q), rng.child(1).gen)
    elif ambient.strategy == "gap-stress":
        ambient_edges, stress = _stress_edges(truth, params, ambient, shared, rng.child(2))
        info["stress_nodes"] = list(stress)
    truth.ambient_edges = np.asarray(sorted(ambient_edges), dtype=np.int64).reshape(-1, 2)
    truth.stress_nodes = stress
    return Graph.from_edges(n, edges + ambient_edges), info


def _stress_edges(truth, params, ambient, shared, rng):
    if not truth.communities:
        raise GenerationInfeasibleError("gap-stress needs at least one community")
    if params.epsilon is None:
        raise InvalidParamsError("gap-stress needs epsilon")
    target = truth.communities[ambient.target]
    size = len(target)
    alpha_c = truth.alpha_floor(ambient.target)
    reach = math.floor((alpha_c - params.epsilon / 2) * size + 1e-9)
    members = truth.membership_counts(params.n)
    outsiders = np.nonzero(members == 0)[0]
    if outsiders.size < ambient.stress_nodes:
        raise GenerationInfeasibleError(
            f"{ambient.stress_nodes} stress nodes requested, {outsiders.size} non-members available")
    gen = rng.gen
    chosen = np.sort(gen.choice(outsiders, size=ambient.stress_nodes, replace=False))
    tarr = np.asarray(target, dtype=np.int64)
    edges = []
    for w in chosen:
        for u in np.sort(gen.choice(tarr, size=reach, replace=False)):
            edges.append((min(int(w), int(u)), max(int(w), int(u))))
    return edges, tuple(int(w) for w in chosen)


def generate(params: ModelParams, model: str, ambient: AmbientSpec | str | None = None,
             seed: int = 0) -> tuple[Graph, GroundTruth, dict]:
    """Plant memberships, assign affinities and realise the graph.

    Output depends only on ``(params, model, ambient, seed)``.
    """
    model = canonical_model(model)
    if ambient is None or isinstance(ambient, str):
        strategy = ambient or "none"
        ambient = AmbientSpec(strategy, q=params.ambient_q, stress_nodes=params.stress_nodes)
    check_params(params, model)
    if model == "sparse" and ambient.strategy != "none":
        raise InvalidParamsError("the sparse model has no ambient edges")
    rng = RngStream(seed)
    comms = plant_memberships(params, model, rng.child(0))
    aff = assign_affinities(comms, params, model, rng.child(1))
    truth = GroundTruth(list(comms), aff, model)
    g, info = realize_graph(truth, params, ambient, rng.child(2))
    record = {
        "model": model,
        "seed": int(seed),
        "params": params.to_dict(),
        "ambient": dataclasses.asdict(ambient),
        "realized": dict(info, n=g.n, m=g.m,
                         community_sizes=[len(c) for c in comms]),
    }
    return g, truth, record
