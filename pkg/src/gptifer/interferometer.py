"""Interferometric protocols: oracle construction, constant-vs-balanced
discrimination, distinguishing-effect search, and unordered search.

An oracle is assembled from per-branch transformations chosen by independent
agents; each choice must be localizable to its own branch (criterion i), and
the assembled transformations must pairwise commute so the composition order
carries no physics.  The constant-vs-balanced run then asks for one fixed
effect that separates the two output classes (criterion ii), either exactly
or, in the weak variant, by a majority margin.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from .core import Effect, GptState, TheoryModel, VectorTheory
from .phase import is_branch_local, localizable_union
from .quaternion import QuatMatrix, Quaternion
from .theories import (
    DensityMatrixTheory,
    QuaternionicTheory,
    embed_rotation,
    gbit_theory,
    quantum_theory,
    quaternionic_theory,
    spekkens_epistemic_statistics,
    spekkens_epistemic_theory,
    spekkens_ontic_statistics,
    spekkens_ontic_theory,
)


class BranchLocalityError(ValueError):
    """An encoding member cannot be localized to its branch (criterion i)."""

    def __init__(self, failures):
        self.failures = tuple(failures)
        detail = "; ".join(
            f"branch {branch}: choice for f(x)={bit} is not branch-local"
            for branch, bit in self.failures
        )
        super().__init__(f"encoding violates branch locality: {detail}")


class NonCommutingEncodingError(ValueError):
    """Encoding members do not pairwise commute, so agent order would matter."""


class UnsupportedTheoryError(ValueError):
    """The theory lacks the machinery a protocol needs."""


# ---------------------------------------------------------------------------
# Oracle specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleSpec:
    """Truth table of f: n-bit strings -> {0, 1}, indexed by branch."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(b) for b in self.table))
        if self.n < 1:
            raise ValueError("need at least one input bit")
        if len(self.table) != 2**self.n:
            raise ValueError(f"table must have 2**{self.n} entries")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be bits")

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "table": list(self.table)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OracleSpec":
        data = json.loads(text)
        return cls(n=int(data["n"]), table=tuple(data["table"]))

    @classmethod
    def from_file(cls, path) -> "OracleSpec":
        return cls.from_json(Path(path).read_text())

    def to_file(self, path) -> None:
        Path(path).write_text(self.to_json())


def classify(spec: OracleSpec) -> str:
    """'constant', 'balanced', or 'neither' by counting ones."""
    ones = sum(spec.table)
    if ones in (0, len(spec.table)):
        return "constant"
    if 2 * ones == len(spec.table):
        return "balanced"
    return "neither"


def constant_balanced_specs(n: int) -> tuple[OracleSpec, ...]:
    """All constant then all balanced tables, in lexicographic order."""
    N = 2**n
    specs = [OracleSpec(n, (0,) * N), OracleSpec(n, (1,) * N)]
    for ones in itertools.combinations(range(N), N // 2):
        table = [0] * N
        for idx in ones:
            table[idx] = 1
        specs.append(OracleSpec(n, tuple(table)))
    return tuple(specs)


@dataclass(frozen=True)
class BranchEncoding:
    """Per-branch transformation pair (choice for f(x)=0, choice for f(x)=1)."""

    pairs: tuple[tuple[object, object], ...]

    @property
    def n_branches(self) -> int:
        return len(self.pairs)

    def choice(self, branch: int, bit: int):
        return self.pairs[branch][bit]

    def members(self):
        for branch, (t0, t1) in enumerate(self.pairs):
            yield branch, 0, t0
            yield branch, 1, t1


@dataclass(frozen=True)
class DJOutcome:
    """Result of one constant-vs-balanced run."""

    p_constant_effect: float
    verdict: str
    output_state: object


@dataclass(frozen=True)
class GroverConfig:
    """Unordered-search setup: N branches, one marked, k repetitions."""

    N: int
    marked: int
    iterations: int

    def __post_init__(self):
        if not 0 <= self.marked < self.N:
            raise ValueError("marked branch out of range")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.N, "marked": self.marked, "iterations": self.iterations},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "GroverConfig":
        data = json.loads(text)
        return cls(int(data["N"]), int(data["marked"]), int(data["iterations"]))


# ---------------------------------------------------------------------------
# Oracle assembly and the constant-vs-balanced run
# ---------------------------------------------------------------------------

VERDICT_ATOL = 1e-9


def build_oracle(m: TheoryModel, spec: OracleSpec, enc: BranchEncoding):
    """Compose the per-branch choices selected by the truth table.

    Every encoding member must be localizable to its own branch; members
    must pairwise commute so that the ascending-index composition order is
    physically irrelevant.  Identity members are exempt from both checks
    (the identity fixes every state and commutes with everything).
    """
    if enc.n_branches != m.n_branches or len(spec.table) != m.n_branches:
        raise ValueError("encoding and truth table must cover every branch")
    nontrivial = []
    failures = []
    for branch, bit, T in enc.members():
        if m.is_identity_map(T):
            continue
        nontrivial.append((branch, bit, T))
        if not is_branch_local(m, T, branch):
            failures.append((branch, bit))
    if failures:
        raise BranchLocalityError(failures)
    for (b1, _, T1), (b2, _, T2) in itertools.combinations(nontrivial, 2):
        if not m.maps_commute(T1, T2):
            raise NonCommutingEncodingError(
                f"choices on branches {b1} and {b2} do not commute"
            )
    oracle = m.identity_map()
    for branch in range(m.n_branches):
        oracle = m.compose(enc.choice(branch, spec.table[branch]), oracle)
    return oracle


def _verdict(p: float) -> str:
    if abs(p - 1.0) <= VERDICT_ATOL:
        return "constant"
    if abs(p) <= VERDICT_ATOL:
        return "balanced"
    return "indeterminate"


def run_dj(m: TheoryModel, spec: OracleSpec, enc: BranchEncoding, s_in, e_C) -> DJOutcome:
    """One constant-vs-balanced query.

    ``s_in`` and ``e_C`` are fixed by the caller before the truth table is
    consulted, keeping the instruments independent of the oracle's content.
    """
    if classify(spec) == "neither":
        raise ValueError("the constant-vs-balanced run requires a promise-abiding table")
    oracle = build_oracle(m, spec, enc)
    s_out = m.apply(oracle, s_in)
    p = m.probability(e_C, s_out)
    return DJOutcome(p, _verdict(p), s_out)


def run_dj_with_global_oracle(m: TheoryModel, spec: OracleSpec, balanced_op, s_in, e_C) -> DJOutcome:
    """Degenerate protocol with one agent who inspects f as a whole.

    Applies the identity when f is constant and ``balanced_op`` when it is
    balanced: a trivial oracle that answers the question directly, with no
    distributed structure left.
    """
    promise = classify(spec)
    if promise == "neither":
        raise ValueError("the constant-vs-balanced run requires a promise-abiding table")
    op = m.identity_map() if promise == "constant" else balanced_op
    s_out = m.apply(op, s_in)
    p = m.probability(e_C, s_out)
    return DJOutcome(p, _verdict(p), s_out)


# ---------------------------------------------------------------------------
# Criterion ii: searching for a distinguishing effect
# ---------------------------------------------------------------------------

WEAK_MARGIN = 1e-6


def _dj_outputs(m: TheoryModel, enc: BranchEncoding, s_in):
    n = int(round(math.log2(m.n_branches)))
    constant_out = []
    balanced_out = []
    for spec in constant_balanced_specs(n):
        oracle = build_oracle(m, spec, enc)
        out = m.apply(oracle, s_in)
        (constant_out if classify(spec) == "constant" else balanced_out).append(out)
    return constant_out, balanced_out


def find_distinguishing_effect(
    m: TheoryModel,
    enc: BranchEncoding,
    s_in,
    strict: bool = True,
    candidate=None,
):
    """Search for one effect satisfying criterion ii over all promise tables.

    For polytope theories the search is a linear feasibility problem over
    the effect polytope cut out by the extremal states: strict mode demands
    pairing 1 with every constant output and 0 with every balanced output;
    weak mode demands a majority margin on both sides.  Round and
    matrix-backed theories verify a supplied analytic candidate instead.
    Returns a witness effect, or None when no effect exists.
    """
    constant_out, balanced_out = _dj_outputs(m, enc, s_in)
    if candidate is not None:
        return candidate if _candidate_works(m, candidate, constant_out, balanced_out, strict) else None
    if not isinstance(m, VectorTheory) or m.extremal_states is None:
        raise UnsupportedTheoryError(
            "effect search needs a polytope theory; supply an analytic candidate instead"
        )
    dim = m.state_dim
    a_ub = []
    b_ub = []
    for v in m.extremal_states:
        a_ub.append(v.probs)
        b_ub.append(1.0)
        a_ub.append(-v.probs)
        b_ub.append(0.0)
    a_eq = []
    b_eq = []
    if strict:
        for out in constant_out:
            a_eq.append(out.probs)
            b_eq.append(1.0)
        for out in balanced_out:
            a_eq.append(out.probs)
            b_eq.append(0.0)
    else:
        for out in constant_out:
            a_ub.append(-out.probs)
            b_ub.append(-(0.5 + WEAK_MARGIN))
        for out in balanced_out:
            a_ub.append(out.probs)
            b_ub.append(0.5 - WEAK_MARGIN)
    result = linprog(
        c=np.zeros(dim),
        A_ub=np.array(a_ub),
        b_ub=np.array(b_ub),
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=[(None, None)] * dim,
        method="highs",
    )
    if not result.success:
        return None
    return Effect(result.x)


def _candidate_works(m, candidate, constant_out, balanced_out, strict) -> bool:
    p_const = [m.probability(candidate, out) for out in constant_out]
    p_bal = [m.probability(candidate, out) for out in balanced_out]
    if strict:
        return all(abs(p - 1.0) <= VERDICT_ATOL for p in p_const) and all(
            abs(p) <= VERDICT_ATOL for p in p_bal
        )
    return all(p >= 0.5 + WEAK_MARGIN for p in p_const) and all(
        p <= 0.5 - WEAK_MARGIN for p in p_bal
    )


def balanced_pair_distinguishability(m: TheoryModel, enc: BranchEncoding, s_in, effects):
    """Exploratory survey: which pairs of balanced tables give outputs that
    some test effect can tell apart.

    Negations of each other are expected to be indistinguishable; the
    remaining pairs usually are distinguishable, but no invariant is
    asserted here.
    """
    n = int(round(math.log2(m.n_branches)))
    balanced = [s for s in constant_balanced_specs(n) if classify(s) == "balanced"]
    outputs = {s.table: m.apply(build_oracle(m, s, enc), s_in) for s in balanced}
    rows = []
    for sa, sb in itertools.combinations(balanced, 2):
        gap = max(
            abs(m.probability(e, outputs[sa.table]) - m.probability(e, outputs[sb.table]))
            for e in effects
        )
        negation = all(a != b for a, b in zip(sa.table, sb.table))
        rows.append(
            {
                "pair": [list(sa.table), list(sb.table)],
                "negation": negation,
                "max_effect_gap": gap,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Unordered search
# ---------------------------------------------------------------------------


def grover_closed_form(N: int, iterations: int) -> float:
    """Success probability sin^2((2k+1) arcsin(1/sqrt(N)))."""
    theta = math.asin(1.0 / math.sqrt(N))
    return math.sin((2 * iterations + 1) * theta) ** 2


def grover_iteration_budget(N: int) -> int:
    """Standard repetition count floor(pi/4 * sqrt(N))."""
    return int(math.floor(math.pi / 4.0 * math.sqrt(N)))


def grover_success_curve(m: TheoryModel, marked: int, max_iterations: int, enc: BranchEncoding | None = None):
    """Marked-branch probability after 0..max_iterations rounds.

    Each round applies the marked-branch phase flip, the beamsplitter, a
    phase flip on branch 0, and the beamsplitter again, starting from the
    uniform superposition the beamsplitter prepares out of branch 0.
    """
    if m.beamsplitter is None:
        diagnosis = ""
        try:
            union = localizable_union(m)
            names = sorted(e.name for e in union)
            diagnosis = f"; its localizable phase operations are only {names}"
        except ValueError:
            pass
        raise UnsupportedTheoryError(
            f"theory {m.name!r} has no beamsplitter transform{diagnosis}"
        )
    N = m.n_branches
    n = int(round(math.log2(N)))
    if 2**n != N:
        raise ValueError("the beamsplitter cascade needs a power-of-two branch count")
    if enc is None:
        enc = sign_encoding(m)
    oracle = build_oracle(m, OracleSpec(n, tuple(1 if x == marked else 0 for x in range(N))), enc)
    flip0 = build_oracle(m, OracleSpec(n, tuple(1 if x == 0 else 0 for x in range(N))), enc)
    B = m.beamsplitter
    step = m.compose(B, m.compose(flip0, m.compose(B, oracle)))
    state = m.apply(B, m.branch_state(0))
    z_marked = m.z_effects[marked]
    curve = [m.probability(z_marked, state)]
    for _ in range(max_iterations):
        state = m.apply(step, state)
        curve.append(m.probability(z_marked, state))
    return curve


def run_grover(m: TheoryModel, cfg: GroverConfig, enc: BranchEncoding | None = None) -> float:
    """Probability of finding the marked branch after cfg.iterations rounds."""
    if cfg.N != m.n_branches:
        raise ValueError("configured branch count does not match the theory")
    return grover_success_curve(m, cfg.marked, cfg.iterations, enc)[-1]


# ---------------------------------------------------------------------------
# Canonical per-theory instruments (fixed before any truth table is read)
# ---------------------------------------------------------------------------


def sign_encoding(m: TheoryModel) -> BranchEncoding:
    """Identity / phase-flip pair on every branch (quantum or quaternionic)."""
    if isinstance(m, DensityMatrixTheory):
        pairs = []
        for x in range(m.dim):
            d = np.ones(m.dim, dtype=complex)
            d[x] = -1.0
            pairs.append((m.identity_map(), np.diag(d)))
        return BranchEncoding(tuple(pairs))
    if isinstance(m, QuaternionicTheory):
        pairs = []
        for x in range(m.dim):
            entries = [Quaternion(1.0)] * m.dim
            entries[x] = Quaternion(-1.0)
            pairs.append((m.identity_map(), QuatMatrix.diag(entries)))
        return BranchEncoding(tuple(pairs))
    raise UnsupportedTheoryError(f"no sign encoding for theory {m.name!r}")


def quantum_dj_instruments(n: int):
    """Model, encoding, input state and closing effect for 2**n branches."""
    m = quantum_theory(n)
    enc = sign_encoding(m)
    s_in = m.uniform_superposition()
    B = m.beamsplitter
    e_C = B @ m.branch_state(0) @ B
    return m, enc, s_in, e_C


def quaternionic_dj_instruments(N: int):
    m = quaternionic_theory(N)
    if m.beamsplitter is None:
        raise ValueError("branch count must be a power of two")
    enc = sign_encoding(m)
    s_in = m.uniform_superposition()
    e_C = m.beamsplitter @ m.branch_state(0) @ m.beamsplitter
    return m, enc, s_in, e_C


def spekkens_epistemic_dj_instruments():
    """Both agents swap within both outcome pairs when their bit is 1.

    Input is the X=+1 state; the closing effect is the X=+1 functional.
    """
    m = spekkens_epistemic_theory()
    swap_both = m.group.by_name("2143")
    enc = BranchEncoding(((m.identity_map(), swap_both), (m.identity_map(), swap_both)))
    s_in = spekkens_epistemic_statistics(frozenset({1, 3}))
    e_C = Effect(np.eye(6)[0])  # X=+1 coordinate effect
    return m, enc, s_in, e_C


def spekkens_ontic_dj_instruments():
    """Each agent swaps the two points resident on its own branch.

    The encoding passes criterion i, yet the two actions are disjoint
    permutations that cannot cancel, which is what defeats criterion ii.
    """
    m = spekkens_ontic_theory()
    upper = m.group.by_name("2134")
    lower = m.group.by_name("1243")
    enc = BranchEncoding(((m.identity_map(), upper), (m.identity_map(), lower)))
    mix = 0.5 * (
        spekkens_ontic_statistics(1).probs + spekkens_ontic_statistics(3).probs
    )
    s_in = GptState(mix)
    e_C = Effect(np.eye(6)[0])
    return m, enc, s_in, e_C


def ball_dj_instruments(m: TheoryModel):
    """Half-turn encoding for a ball theory (single-bit problem only).

    Both branches get the rotation by pi in the first two non-branch
    coordinates; the input is the first-measurement +1 surface state and the
    closing effect its functional.  Needs at least three measurements, since
    the two-measurement ball has no orientation-preserving phase dynamics.
    """
    d = len(m.fiducial_layout)
    if d < 3:
        raise UnsupportedTheoryError(
            "the two-measurement ball has a trivial phase group; no encoding exists"
        )
    R = np.eye(d)
    R[0, 0] = -1.0
    R[1, 1] = -1.0
    half_turn = embed_rotation(R, "half-turn(12)")
    enc = BranchEncoding(((m.identity_map(), half_turn), (m.identity_map(), half_turn)))
    vec = np.full(2 * d, 0.5)
    vec[0] = 1.0
    vec[1] = 0.0
    s_in = GptState(vec)
    e_C = Effect(np.eye(2 * d)[0])
    return m, enc, s_in, e_C


def gbit_global_instruments():
    """Square-bit setup for the global (non-distributed) protocol."""
    m = gbit_theory(2)
    x_flip = m.group.by_name("X-flip")
    vec = np.array([0.5, 0.5, 1.0, 0.0])
    s_in = GptState(vec)
    e_C = Effect(np.eye(4)[2])  # X=+1
    return m, x_flip, s_in, e_C
