"""End-to-end rank-one search pipelines.

Over Q: maximal order, numerical embedding, rational approximation, LLL,
then short-vector enumeration; the first vector whose exact ideal rank is
one yields the isomorphism.  Over Q(i) and Q(sqrt(-3)) the order embeds
into R^8 and only the minimal-norm class needs testing.  Floating point
steers the search; every accepted answer is verified in exact arithmetic.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import (
    AlgebraElement,
    IsomorphismWitness,
    StructureConstants,
    build_isomorphism,
    ideal_rank,
    matrix_units_table,
)
from .embed import embed_order, rationalize, split_numeric
from .errors import InputError, PrecisionError, PromiseViolation
from .exactnum import ExactMatrix, Field, QQ
from .lattice import (
    BoxStats,
    LatticeBasis,
    berge_martinet_upper,
    box_enumerate,
    c_m,
    hermite_gamma,
    lll_reduce,
    orthogonality_defect,
    short_vectors,
)
from .orders import Order, maximal_order

MAX_RATIONAL_SIZE = 43


@dataclass
class SplitConfig:
    seed: int = 0
    precision_bits: int = 128
    max_precision_bits: int = 4096
    factor_budget: int = 10**6
    enumeration_budget: int = 10**6
    engine: str = "ordered"  # "ordered" or "box"
    dynamic_pruning: bool = False
    rational_denominator: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.engine not in ("ordered", "box"):
            raise InputError(f"unknown engine {self.engine!r}")
        if self.precision_bits < 64:
            raise InputError("precision_bits must be at least 64")
        if self.factor_budget <= 0 or self.enumeration_budget <= 0:
            raise InputError("budgets must be positive")


@dataclass
class SplitStats:
    engine: str
    dynamic_pruning: bool
    precision_bits: int
    nodes_visited: int
    found_norm: float
    norm_bound: float
    disc_trace: list
    wall_time: float
    norm_bound_satisfied: bool
    box_nodes_static: int | None = None
    box_nodes_cm_flat: int | None = None
    minimal_class_size: int | None = None


@dataclass
class SplitResult:
    rank_one_element: AlgebraElement
    witness: IsomorphismWitness
    stats: SplitStats


class _Lifter:
    """Maps enumeration coefficient vectors to exact algebra elements."""

    def __init__(self, table, reduced: LatticeBasis, zbasis_elements):
        self.table = table
        self.history = reduced.unimodular_history
        self.zbasis = zbasis_elements
        self.k = reduced.rank

    def element(self, coeffs: Sequence[int]) -> AlgebraElement:
        zc = [
            sum(self.history[i][j] * coeffs[j] for j in range(self.k))
            for i in range(self.k)
        ]
        coords = [self.table.field.zero()] * self.table.m
        for i, c in enumerate(zc):
            if c:
                cc = self.table.field.coerce(c)
                coords = [a + cc * b for a, b in zip(coords, self.zbasis[i].coords)]
        return AlgebraElement(self.table, coords)


def _prepare_lattice(table, order, config: SplitConfig, precision_bits: int):
    emb = split_numeric(table, order, precision_bits, seed=config.seed)
    embedded = embed_order(emb, order)
    denom = config.rational_denominator or 2 ** max(48, precision_bits // 2)
    basis = rationalize(embedded, denom)
    reduced = lll_reduce(basis)
    return emb, embedded, basis, reduced


def split_over_Q(
    table: StructureConstants,
    config: SplitConfig | None = None,
    order: Order | None = None,
) -> SplitResult:
    """Rank-one element and explicit isomorphism for a split algebra over Q."""
    config = config or SplitConfig()
    if not table.field.is_rational:
        raise InputError("split_over_Q needs an algebra over Q")
    n = table.n  # raises InputError for non-square dimension
    if n > MAX_RATIONAL_SIZE:
        raise InputError(
            f"n = {n} exceeds {MAX_RATIONAL_SIZE}; minimal vectors are "
            "no longer guaranteed to have rank one"
        )
    table.find_identity()
    start = time.monotonic()
    disc_trace: list = []
    if order is None:
        order = maximal_order(table, config.factor_budget, disc_trace=disc_trace)
    precision = config.precision_bits
    last_error: Exception | None = None
    while precision <= config.max_precision_bits:
        try:
            emb, embedded, basis, reduced = _prepare_lattice(
                table, order, config, precision
            )
            return _search_rational(
                table, order, config, precision, reduced, embedded, disc_trace, start
            )
        except PrecisionError as exc:
            last_error = exc
            precision *= 2
    raise last_error or PrecisionError("precision insufficient")


def _search_rational(table, order, config, precision, reduced, embedded, disc_trace, start):
    n = table.n
    slack = 2.0 ** (-(precision // 4))
    pert = (reduced.perturbation or 0.0) * reduced.rank
    gamma_bound = berge_martinet_upper(n)
    lifter = _Lifter(table, reduced, embedded.zbasis_elements)
    if config.engine == "ordered":
        return _run_ordered(
            table, config, precision, reduced, lifter, gamma_bound, slack, pert,
            disc_trace, start,
        )
    return _run_box(
        table, config, precision, reduced, lifter, gamma_bound, slack, pert,
        disc_trace, start,
    )


def _run_ordered(
    table, config, precision, reduced, lifter, gamma_bound, slack, pert,
    disc_trace, start,
):
    gram = reduced.gram()
    full_bound = gamma_bound * (1 + slack) + pert
    # start at the shortest reduced vector: by the rank-one property of
    # minimal vectors this almost always suffices, and it keeps skewed
    # embeddings from flooding the enumeration
    lam_bound = math.sqrt(min(float(gram[i][i]) for i in range(reduced.rank)))
    ladder = [lam_bound * (1 + slack) + pert, full_bound, 2 * full_bound]
    nodes = 0
    for bound in ladder:
        vecs = short_vectors(gram, bound, budget=config.enumeration_budget)
        for coeffs, nsq in vecs:
            nodes += 1
            element = lifter.element(coeffs)
            if ideal_rank(element, table.n) == 1:
                witness = build_isomorphism(table, element)
                found_norm = math.sqrt(float(nsq))
                return SplitResult(
                    rank_one_element=element,
                    witness=witness,
                    stats=SplitStats(
                        engine="ordered",
                        dynamic_pruning=False,
                        precision_bits=precision,
                        nodes_visited=nodes,
                        found_norm=found_norm,
                        norm_bound=full_bound,
                        disc_trace=disc_trace,
                        wall_time=time.monotonic() - start,
                        norm_bound_satisfied=found_norm
                        <= hermite_gamma(table.n)[0] * (1 + slack) + pert,
                    ),
                )
    raise PromiseViolation(
        "enumeration exhausted without a rank-one element; "
        "the input algebra is most likely not split"
    )


def _run_box(
    table, config, precision, reduced, lifter, gamma_bound, slack, pert,
    disc_trace, start,
):
    gram = reduced.gram()
    k = reduced.rank
    norms = [math.sqrt(float(gram[i][i])) for i in range(k)]
    defect = orthogonality_defect(reduced)
    cap = gamma_bound * (1 + slack) + pert
    static_bounds = [int(math.floor(defect * cap / nm)) for nm in norms]
    state = {"d": math.inf}

    def dyn_bounds():
        val = min(state["d"], cap)
        return [int(math.floor(defect * val / nm)) for nm in norms]

    stats = BoxStats()
    best = None  # (norm_sq, coeffs, element)
    gen = box_enumerate(
        static_bounds,
        dynamic_bounds_fn=dyn_bounds if config.dynamic_pruning else None,
        stats=stats,
        budget=config.enumeration_budget,
    )
    for coeffs in gen:
        nsq = _quadratic_form(gram, coeffs)
        element = lifter.element(coeffs)
        r = ideal_rank(element, table.n)
        if r == 0:
            continue
        norm = math.sqrt(float(nsq))
        if config.dynamic_pruning:
            state["d"] = dynamic_bound_update(state["d"], norm, r)
        if r == 1 and (best is None or (nsq, coeffs) < (best[0], best[1])):
            best = (nsq, coeffs, element)
    if best is None:
        raise PromiseViolation(
            "box enumeration exhausted without a rank-one element; "
            "the input algebra is most likely not split"
        )
    nsq, coeffs, element = best
    witness = build_isomorphism(table, element)
    found_norm = math.sqrt(float(nsq))
    cm = c_m(k)
    cm_flat_nodes = (2 * int(cm) + 1) ** k
    return SplitResult(
        rank_one_element=element,
        witness=witness,
        stats=SplitStats(
            engine="box",
            dynamic_pruning=config.dynamic_pruning,
            precision_bits=precision,
            nodes_visited=stats.nodes,
            found_norm=found_norm,
            norm_bound=cap,
            disc_trace=disc_trace,
            wall_time=time.monotonic() - start,
            norm_bound_satisfied=found_norm
            <= hermite_gamma(table.n)[0] * (1 + slack) + pert,
            box_nodes_static=_box_volume(static_bounds),
            box_nodes_cm_flat=cm_flat_nodes,
        ),
    )


def _box_volume(bounds: Sequence[int]) -> int:
    vol = 1
    for b in bounds:
        vol *= 2 * b + 1
    return vol


def _quadratic_form(gram, coeffs) -> Fraction:
    k = len(coeffs)
    acc = Fraction(0)
    for i in range(k):
        ci = coeffs[i]
        if not ci:
            continue
        acc += gram[i][i] * ci * ci
        for j in range(i + 1, k):
            if coeffs[j]:
                acc += 2 * gram[i][j] * ci * coeffs[j]
    return acc


def dynamic_bound_update(d_current: float, norm_c: float, rank_c: int) -> float:
    """min(d, gamma_r^2 / sqrt(r) * ||C||): the online shrink of the search box."""
    if rank_c < 1:
        return d_current
    g, _ = hermite_gamma(rank_c)
    return min(d_current, g * g / math.sqrt(rank_c) * norm_c)


def split_imag_quad(
    table: StructureConstants,
    config: SplitConfig | None = None,
    order: Order | None = None,
) -> SplitResult:
    """Rank-one search for 2x2 algebras over Q(i) or Q(sqrt(-3)).

    The order lattice lives in R^8; every vector in the minimal-norm class
    (up to the precision slack) is rank-tested exactly, in norm-then-lex
    order, and the first rank-one element wins.  Over Q(sqrt(-3)) the first
    minimal vector is already the answer; over Q(i) at least one member of
    the class is.
    """
    config = config or SplitConfig()
    field = table.field
    if field.is_rational or field.d not in (1, 3):
        raise InputError("split_imag_quad needs d = 1 or d = 3")
    if table.n != 2:
        raise InputError("the quadratic-field pipeline is for 2x2 algebras")
    table.find_identity()
    start = time.monotonic()
    disc_trace: list = []
    if order is None:
        order = maximal_order(table, config.factor_budget, disc_trace=disc_trace)
    precision = config.precision_bits
    last_error: Exception | None = None
    while precision <= config.max_precision_bits:
        try:
            emb, embedded, basis, reduced = _prepare_lattice(
                table, order, config, precision
            )
            return _search_minimal_class(
                table, config, precision, reduced, embedded, disc_trace, start
            )
        except PrecisionError as exc:
            last_error = exc
            precision *= 2
    raise last_error or PrecisionError("precision insufficient")


def _search_minimal_class(table, config, precision, reduced, embedded, disc_trace, start):
    slack = 2.0 ** (-(precision // 4))
    pert = (reduced.perturbation or 0.0) * reduced.rank
    gram = reduced.gram()
    start_bound = math.sqrt(min(float(gram[i][i]) for i in range(reduced.rank)))
    vecs = short_vectors(
        gram, start_bound * (1 + slack) + pert, budget=config.enumeration_budget
    )
    if not vecs:
        raise PromiseViolation("no nonzero vectors below the shortest basis norm")
    lam_sq = float(vecs[0][1])
    class_cut = lam_sq * (1 + slack) ** 2 + 2 * pert
    minimal_class = [cv for cv in vecs if float(cv[1]) <= class_cut]
    lifter = _Lifter(table, reduced, embedded.zbasis_elements)
    nodes = 0
    for coeffs, nsq in minimal_class:
        nodes += 1
        element = lifter.element(coeffs)
        if ideal_rank(element, table.n) == 1:
            witness = build_isomorphism(table, element)
            found_norm = math.sqrt(float(nsq))
            return SplitResult(
                rank_one_element=element,
                witness=witness,
                stats=SplitStats(
                    engine="ordered",
                    dynamic_pruning=False,
                    precision_bits=precision,
                    nodes_visited=nodes,
                    found_norm=found_norm,
                    norm_bound=math.sqrt(class_cut),
                    disc_trace=disc_trace,
                    wall_time=time.monotonic() - start,
                    norm_bound_satisfied=True,
                    minimal_class_size=len(minimal_class),
                ),
            )
    raise PromiseViolation(
        "no minimal-norm vector has rank one; the algebra violates the "
        "split promise"
    )


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------


@dataclass
class GeneratedInstance:
    table: StructureConstants
    base_change: ExactMatrix  # columns are a-basis coordinates of the new basis
    field: Field

    def hidden_matrix(self, coords: Sequence) -> ExactMatrix:
        """Image of an element (coords in the generated basis) as an exact
        matrix over the base field, through the recorded base change."""
        acoords = self.base_change.mul_vector(coords)
        n = self.table.n
        rows = [[acoords[i * n + j] for j in range(n)] for i in range(n)]
        return ExactMatrix(self.field, rows)


def _small_field_elements(field: Field):
    if field.is_rational:
        return [Fraction(c) for c in (-2, -1, 1, 2)]
    out = []
    omega = field.omega()
    for u in (-1, 0, 1):
        for v in (-1, 0, 1):
            if u or v:
                out.append(field.coerce(u) + field.coerce(v) * omega)
    return out


def _height(x) -> int:
    from .exactnum import QuadScalar

    if isinstance(x, QuadScalar):
        f = [abs(x.a), abs(x.b), abs(x.a - x.b), abs(2 * x.b)]
        return int(max(math.ceil(v) for v in f))
    return int(math.ceil(abs(Fraction(x))))


def _bounded_unimodular(m: int, height: int, field: Field, rng: random.Random):
    """Random unimodular matrix (rows) with entry heights within the bound."""
    rows = [[field.one() if i == j else field.zero() for j in range(m)] for i in range(m)]
    elems = _small_field_elements(field)
    ops = 0
    attempts = 0
    target_ops = 3 * m
    while ops < target_ops and attempts < 40 * m:
        attempts += 1
        i, j = rng.randrange(m), rng.randrange(m)
        if i == j:
            continue
        c = elems[rng.randrange(len(elems))]
        cand = [rows[i][t] + c * rows[j][t] for t in range(m)]
        if max(_height(x) for x in cand) <= height:
            rows[i] = cand
            ops += 1
    if rng.random() < 0.5:
        i, j = rng.randrange(m), rng.randrange(m)
        if i != j:
            rows[i], rows[j] = rows[j], rows[i]
    return rows


def _scale_element(field: Field, rng: random.Random):
    if field.is_rational:
        return field.coerce(rng.choice([1, 1, 2, 3]))
    if field.d == 1:
        # norm 1 or 2 scalings keep discriminants smooth
        return rng.choice([field.one(), field.coerce(1) + field.omega()])
    omega = field.omega()
    return rng.choice([field.one(), omega + omega - field.one()])  # 1 or sqrt(-3)


def generate_instance(
    n: int,
    field: Field | str = QQ,
    height_bound: int = 10,
    seed: int = 0,
) -> GeneratedInstance:
    """Scrambled full matrix algebra instance with a recorded base change.

    Starts from the matrix-unit table, applies a seeded invertible base
    change built from height-bounded unimodular operations and one small
    scaling (so discriminants stay smooth), and recomputes the structure
    constants exactly.  ``height_bound = 0`` returns the standard table.
    """
    if isinstance(field, str):
        field = {"Q": QQ, "gauss": Field(1), "eisenstein": Field(3)}.get(field) or _bad_field(field)
    if n < 1:
        raise InputError("n must be positive")
    table = matrix_units_table(n, field)
    m = n * n
    if height_bound == 0:
        return GeneratedInstance(
            table=table,
            base_change=ExactMatrix.identity(field, m),
            field=field,
        )
    if height_bound < 0:
        raise InputError("height bound must be nonnegative")
    rng = random.Random(seed)
    rows = _bounded_unimodular(m, max(1, height_bound), field, rng)
    s = _scale_element(field, rng)
    if _height(s) > 1:
        # scale the last row, respecting the height bound
        scaled = [s * x for x in rows[m - 1]]
        if max(_height(x) for x in scaled) <= height_bound:
            rows[m - 1] = scaled
    return instance_from_base_change(table, rows, field)


def _bad_field(name):
    raise InputError(f"unknown field {name!r}; use Q, gauss or eisenstein")


def instance_from_base_change(
    table: StructureConstants, rows: Sequence[Sequence], field: Field
) -> GeneratedInstance:
    """Instance whose basis is b_i = sum_j rows[i][j] a_j over a given table."""
    m = table.m
    M = ExactMatrix(field, [[rows[i][j] for i in range(m)] for j in range(m)])
    # columns of M are the a-coordinates of the new basis
    Minv = M.inverse()
    gamma = []
    cols = [M.column(i) for i in range(m)]
    for i in range(m):
        plane = []
        for j in range(m):
            prod = table.multiply(cols[i], cols[j])
            plane.append(list(Minv.mul_vector(prod)))
        gamma.append(plane)
    new_table = StructureConstants(field, gamma)
    return GeneratedInstance(table=new_table, base_change=M, field=field)
