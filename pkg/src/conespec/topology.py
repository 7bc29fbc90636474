"""Integer bookkeeping for glued manifolds M = M1 u_Sigma M2.

Everything here works on Betti numbers supplied by the caller or by the
shipped decomposition catalog; nothing is computed from a triangulation.
Dimensions: M, M1, M2 have dimension m, the gluing hypersurface Sigma has
dimension n = m - 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

IDENTIFICATION_UNAVAILABLE = "identification unavailable"


@dataclass(frozen=True)
class CohomologyInput:
    m: int
    betti_M1: tuple[int, ...]
    betti_M2: tuple[int, ...]
    betti_Sigma: tuple[int, ...]
    betti_M: tuple[int, ...]
    relative_betti_M2: tuple[int, ...]
    image_rank_mid: int | None = None
    name: str = ""

    def __post_init__(self):
        for f in ("betti_M1", "betti_M2", "betti_Sigma", "betti_M", "relative_betti_M2"):
            vals = tuple(int(x) for x in getattr(self, f))
            object.__setattr__(self, f, vals)
            if any(x < 0 for x in vals):
                raise ValueError(f"{f} has a negative entry")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        for f in ("betti_M1", "betti_M2", "betti_M", "relative_betti_M2"):
            if len(getattr(self, f)) != self.m + 1:
                raise ValueError(f"{f} needs {self.m + 1} entries (degrees 0..m)")
        if len(self.betti_Sigma) != self.m:
            raise ValueError(f"betti_Sigma needs {self.m} entries (degrees 0..n)")
        if self.image_rank_mid is not None and self.image_rank_mid < 0:
            raise ValueError("image_rank_mid must be >= 0")

    @property
    def n(self) -> int:
        return self.m - 1

    @classmethod
    def zero(cls, m: int) -> "CohomologyInput":
        z = (0,) * (m + 1)
        return cls(m, z, z, (0,) * m, z, z, 0 if (m - 1) % 2 else None)

    @classmethod
    def from_dict(cls, d: dict) -> "CohomologyInput":
        known = {"name", "description", "m", "betti_M1", "betti_M2", "betti_Sigma", "betti_M",
                 "relative_betti_M2", "image_rank_mid"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown cohomology field(s): {sorted(extra)}")
        return cls(int(d["m"]), d["betti_M1"], d["betti_M2"], d["betti_Sigma"], d["betti_M"],
                   d["relative_betti_M2"], d.get("image_rank_mid"), d.get("name", ""))

    def to_dict(self) -> dict:
        return {"name": self.name, "m": self.m, "betti_M1": list(self.betti_M1),
                "betti_M2": list(self.betti_M2), "betti_Sigma": list(self.betti_Sigma),
                "betti_M": list(self.betti_M), "relative_betti_M2": list(self.relative_betti_M2),
                "image_rank_mid": self.image_rank_mid}

    def replace(self, field_name: str, index: int, value: int) -> "CohomologyInput":
        d = self.to_dict()
        d[field_name] = list(d[field_name])
        d[field_name][index] = value
        return CohomologyInput.from_dict(d)


def l2_cohomology(inp: CohomologyInput, k: int) -> int:
    """Dimension of L2 harmonic k-forms on M2 with an infinite cone attached."""
    if not 0 <= k <= inp.m:
        raise ValueError(f"degree {k} outside 0..{inp.m}")
    twice = 2 * k
    if twice < inp.n + 1:
        return inp.relative_betti_M2[k]
    if twice == inp.n + 1:
        if inp.image_rank_mid is None:
            raise ValueError(f"degree {k} needs image_rank_mid (rank of H^k(M2, Sigma) -> H^k(M2))")
        return inp.image_rank_mid
    return inp.betti_M2[k]


def ker_dmax_dmin(inp: CohomologyInput, p: int) -> int | str:
    """Intersection-cohomology count for M1 with a cone on Sigma, when identifiable.

    Uses H^p(M1) for p <= n/2 and H^p_c(M1) = H_(m-p)(M1) for p >= n/2 + 1.
    Returns ``IDENTIFICATION_UNAVAILABLE`` when n is even with H^(n/2)(Sigma)
    nonzero, and for the degree strictly between n/2 and n/2 + 1 (n odd).
    """
    if not 0 <= p <= inp.m:
        raise ValueError(f"degree {p} outside 0..{inp.m}")
    n = inp.n
    if n % 2 == 0 and inp.betti_Sigma[n // 2] != 0:
        return IDENTIFICATION_UNAVAILABLE
    if 2 * p <= n:
        return inp.betti_M1[p]
    if 2 * p >= n + 2:
        return inp.betti_M1[inp.m - p]
    return IDENTIFICATION_UNAVAILABLE


@dataclass
class ConsistencyReport:
    consistent: bool
    euler_defect: int
    impossible_terms: list[str] = field(default_factory=list)
    duality_failures: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"consistent": self.consistent, "euler_defect": self.euler_defect,
                "impossible_terms": self.impossible_terms, "duality_failures": self.duality_failures}


def _mayer_vietoris_terms(inp: CohomologyInput) -> list[tuple[str, int]]:
    """0 -> H^0(M) -> H^0(M1)+H^0(M2) -> H^0(Sigma) -> H^1(M) -> ... -> 0."""
    terms = []
    for k in range(inp.m + 1):
        terms.append((f"H^{k}(M)", inp.betti_M[k]))
        terms.append((f"H^{k}(M1)+H^{k}(M2)", inp.betti_M1[k] + inp.betti_M2[k]))
        if k < inp.m:
            terms.append((f"H^{k}(Sigma)", inp.betti_Sigma[k]))
    return terms


def _euler(betti) -> int:
    return sum((-1) ** k * x for k, x in enumerate(betti))


def mv_check(inp: CohomologyInput) -> ConsistencyReport:
    """Whether the Betti numbers admit an exact Mayer-Vietoris sequence.

    Along an exact sequence bounded by zeros the ranks of the maps are forced:
    each map's rank is the term's dimension minus the incoming rank. A negative
    forced rank marks a term where exactness is impossible, and a nonzero rank
    left over at the end is the Euler-characteristic defect. Poincare duality
    of M and Sigma and Lefschetz duality for (M2, Sigma) are checked as well.
    """
    terms = _mayer_vietoris_terms(inp)
    impossible = []
    incoming = 0
    for label, dim in terms:
        rank = dim - incoming
        if rank < 0:
            impossible.append(label)
            rank = 0
        incoming = rank
    defect = (_euler(inp.betti_M) - _euler(inp.betti_M1) - _euler(inp.betti_M2)
              + _euler(inp.betti_Sigma))
    if incoming != 0 and not impossible:
        impossible.append(terms[-1][0])

    duality = []
    m, n = inp.m, inp.n
    for k in range(m + 1):
        if inp.betti_M[k] != inp.betti_M[m - k]:
            duality.append(f"b_{k}(M) != b_{m - k}(M)")
        if inp.relative_betti_M2[k] != inp.betti_M2[m - k]:
            duality.append(f"b_{k}(M2, Sigma) != b_{m - k}(M2)")
    for k in range(n + 1):
        if inp.betti_Sigma[k] != inp.betti_Sigma[n - k]:
            duality.append(f"b_{k}(Sigma) != b_{n - k}(Sigma)")
    ok = not impossible and defect == 0 and not duality
    return ConsistencyReport(ok, defect, impossible, duality)


def load_decompositions() -> list[CohomologyInput]:
    """The shipped catalog of sphere, product-sphere and connected-sum decompositions."""
    text = resources.files("conespec").joinpath("data/decompositions.json").read_text()
    return [CohomologyInput.from_dict(d) for d in json.loads(text)["decompositions"]]


# ---------------------------------------------------------------- small eigenvalue predictions

def _sphere_betti(k: int) -> list[int]:
    b = [0] * (k + 1)
    b[0] += 1
    b[k] += 1
    return b


def _product_betti(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@dataclass(frozen=True)
class Prediction:
    target: str
    dim: int
    degrees: tuple[int, ...]  # coexact degree first, then its dual (exact) degree
    kind: tuple[str, ...]
    forcing_holds: bool  # dim H^k(M) < dim H^k(Sigma_2) at the coexact degree


@dataclass(frozen=True)
class SmallEigenvaluePrediction:
    n1: int
    n2: int
    n: int
    m: int
    gamma: float
    in_open_band: bool  # |gamma| < 1/2
    boundary_case: bool  # gamma = -1/2
    domain: str  # "W" for gamma = 0, "minimal" when gamma < 0
    predictions: tuple[Prediction, ...]

    def all_degrees(self) -> set[int]:
        return {k for p in self.predictions for k in p.degrees}


def predict_small_eigenvalues(n1: int, n2: int) -> SmallEigenvaluePrediction:
    """Small eigenvalues forced by gluing D^(n1+1) x S^n2 to S^n1 x D^(n2+1) and variants.

    The volume form of S^n2 sits in the channel gamma = n2 - n/2. When it is
    not cohomologous to anything on M (fewer classes in H^n2(M) than in
    H^n2(S^n2)) it yields a small coexact eigenvalue in degree n2, and by
    duality an exact one in degree m - n2. Targets: the sphere S^m, and
    S^n1 x S^(n2+1) when n2 < n1 (replacing D^(n1+1) by S^n1 x [0,1]).
    """
    if int(n1) != n1 or int(n2) != n2 or n2 < 0 or n1 < 0:
        raise ValueError("n1 and n2 must be non-negative integers")
    if n2 > n1:
        raise ValueError("need n2 <= n1")
    if n1 + n2 < 2:
        raise ValueError("need n1 + n2 >= 2")
    n = n1 + n2
    m = n + 1
    gamma = n2 - n / 2.0
    domain = "W" if gamma == 0.0 else "minimal"
    sigma2 = _sphere_betti(n2)

    def forced(betti_m: list[int], k: int, source: list[int]) -> bool:
        return betti_m[k] < source[k]

    preds = [Prediction(f"S^{m}", m, (n2, m - n2), ("coexact", "exact"),
                        forced(_sphere_betti(m), n2, sigma2))]
    if n2 < n1:
        prod = _product_betti(_sphere_betti(n1), _sphere_betti(n2 + 1))
        preds.append(Prediction(f"S^{n1} x S^{n2 + 1}", m, (n2, m - n2), ("coexact", "exact"),
                                forced(prod, n2, sigma2)))
    return SmallEigenvaluePrediction(n1, n2, n, m, gamma, abs(gamma) < 0.5, gamma == -0.5,
                                     domain, tuple(preds))
