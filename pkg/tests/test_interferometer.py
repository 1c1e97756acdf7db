"""Tests for oracle assembly, the constant-vs-balanced run, effect search,
and the unordered search.

Core claims:
    - classify counts ones; the single-marked table is 'neither'
    - oracle assembly reproduces diag(1,-1) for the one-bit flip table,
      rejects box-world encodings with the offending branch named, and
      rejects non-commuting encodings
    - quantum runs: p = 1 constant / p = 0 balanced, exhaustively, matching
      the independent closed form |sum +-1|^2 / 4^n
    - toy-bit runs: the documented 13 -> 13 / 13 -> 24 behavior with exact
      1/0 probabilities on the X effect
    - effect search: none for the hidden variable even in weak mode; the
      X=+1 witness for the restricted toy bit; the plus-projector candidate
      for the one-bit quantum run
    - unordered search matches sin^2((2k+1) asin(1/sqrt(N))) and the
      quaternionic run reproduces the complex run
    - wire formats for oracle tables and search configs round-trip
"""

import json
import math

import numpy as np
import pytest

from gptifer.core import Effect
from gptifer.interferometer import (
    BranchEncoding,
    BranchLocalityError,
    GroverConfig,
    NonCommutingEncodingError,
    OracleSpec,
    UnsupportedTheoryError,
    ball_dj_instruments,
    balanced_pair_distinguishability,
    build_oracle,
    classify,
    constant_balanced_specs,
    find_distinguishing_effect,
    gbit_global_instruments,
    grover_closed_form,
    grover_iteration_budget,
    grover_success_curve,
    quantum_dj_instruments,
    quaternionic_dj_instruments,
    run_dj,
    run_dj_with_global_oracle,
    run_grover,
    spekkens_epistemic_dj_instruments,
    spekkens_ontic_dj_instruments,
)
from gptifer.theories import (
    classical_theory,
    dball_theory,
    embed_rotation,
    gbit_theory,
    quantum_theory,
    quaternionic_theory,
    spekkens_epistemic_statistics,
)


# -- classification ---------------------------------------------------------------


def test_classify_examples():
    assert classify(OracleSpec(1, (0, 0))) == "constant"
    assert classify(OracleSpec(2, (0, 1, 1, 0))) == "balanced"
    assert classify(OracleSpec(2, (1, 0, 0, 0))) == "neither"


def test_spec_validation():
    with pytest.raises(ValueError):
        OracleSpec(2, (0, 1))
    with pytest.raises(ValueError):
        OracleSpec(1, (0, 2))


def test_constant_balanced_counts():
    assert len(constant_balanced_specs(1)) == 4
    assert len(constant_balanced_specs(2)) == 8
    assert len(constant_balanced_specs(3)) == 72


# -- oracle assembly -----------------------------------------------------------------


def test_quantum_one_bit_flip_oracle_is_diag_one_minus_one():
    m, enc, _, _ = quantum_dj_instruments(1)
    U = build_oracle(m, OracleSpec(1, (0, 1)), enc)
    np.testing.assert_allclose(U, np.diag([1.0, -1.0]), atol=1e-12)


def test_constant_zero_oracle_is_identity():
    m, enc, _, _ = quantum_dj_instruments(2)
    U = build_oracle(m, OracleSpec(2, (0, 0, 0, 0)), enc)
    np.testing.assert_allclose(U, np.eye(4), atol=1e-12)


def test_box_world_encoding_rejected_with_branch_report():
    m = gbit_theory(2)
    x_flip = m.group.by_name("X-flip")
    for branch in (0, 1):
        pairs = [(m.identity_map(), m.identity_map()), (m.identity_map(), m.identity_map())]
        pairs[branch] = (m.identity_map(), x_flip)
        enc = BranchEncoding(tuple(pairs))
        table = tuple(1 if b == branch else 0 for b in range(2))
        with pytest.raises(BranchLocalityError) as err:
            build_oracle(m, OracleSpec(1, table), enc)
        assert err.value.failures == ((branch, 1),)


def test_commuting_ball_encoding_in_disjoint_planes_accepted():
    m = dball_theory(5)
    half_01 = np.eye(5)
    half_01[0, 0] = half_01[1, 1] = -1.0
    half_23 = np.eye(5)
    half_23[2, 2] = half_23[3, 3] = -1.0
    enc = BranchEncoding(
        ((m.identity_map(), embed_rotation(half_01)),
         (m.identity_map(), embed_rotation(half_23)))
    )
    oracle = build_oracle(m, OracleSpec(1, (1, 1)), enc)
    # both half-turns applied: coordinates 0..3 all change sign
    vec = np.full(10, 0.5)
    vec[0], vec[1] = 1.0, 0.0
    out = oracle.matrix @ vec
    np.testing.assert_allclose(out[:2], [0.0, 1.0], atol=1e-12)


def test_noncommuting_ball_encoding_rejected():
    m = dball_theory(4)
    quarter_01 = np.eye(4)
    quarter_01[:2, :2] = [[0.0, -1.0], [1.0, 0.0]]
    quarter_12 = np.eye(4)
    quarter_12[1:3, 1:3] = [[0.0, -1.0], [1.0, 0.0]]
    T1 = embed_rotation(quarter_01, "quarter(01)")
    T2 = embed_rotation(quarter_12, "quarter(12)")
    enc = BranchEncoding(((m.identity_map(), T1), (m.identity_map(), T2)))
    with pytest.raises(NonCommutingEncodingError):
        build_oracle(m, OracleSpec(1, (1, 1)), enc)


# -- quantum runs ---------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quantum_runs_match_closed_form_exhaustively(n):
    m, enc, s_in, e_C = quantum_dj_instruments(n)
    for spec in constant_balanced_specs(n):
        out = run_dj(m, spec, enc, s_in, e_C)
        closed = abs(sum((-1.0) ** b for b in spec.table)) ** 2 / 4.0**n
        assert out.p_constant_effect == pytest.approx(closed, abs=1e-12)
        assert out.verdict == classify(spec)


def test_run_dj_rejects_unpromised_tables():
    m, enc, s_in, e_C = quantum_dj_instruments(2)
    with pytest.raises(ValueError):
        run_dj(m, OracleSpec(2, (1, 0, 0, 0)), enc, s_in, e_C)


# -- toy-bit runs ------------------------------------------------------------------------


def test_restricted_toy_bit_runs_reach_13_or_24():
    m, enc, s_in, e_C = spekkens_epistemic_dj_instruments()
    out_const = run_dj(m, OracleSpec(1, (1, 1)), enc, s_in, e_C)
    np.testing.assert_array_equal(
        out_const.output_state.probs,
        spekkens_epistemic_statistics(frozenset({1, 3})).probs,
    )
    assert out_const.p_constant_effect == 1.0
    out_bal = run_dj(m, OracleSpec(1, (0, 1)), enc, s_in, e_C)
    np.testing.assert_array_equal(
        out_bal.output_state.probs,
        spekkens_epistemic_statistics(frozenset({2, 4})).probs,
    )
    assert out_bal.p_constant_effect == 0.0


def test_hidden_variable_runs_land_in_overlapping_classes():
    m, enc, s_in, e_C = spekkens_ontic_dj_instruments()
    probs = {}
    for spec in constant_balanced_specs(1):
        out = run_dj(m, spec, enc, s_in, e_C)
        probs[spec.table] = out.p_constant_effect
    # constant-1 output looks balanced on the X effect; that is the failure
    assert probs[(0, 0)] == 1.0
    assert probs[(1, 1)] == 0.0
    assert probs[(0, 1)] == 0.5
    assert probs[(1, 0)] == 0.5


# -- effect search -----------------------------------------------------------------------------


def test_hidden_variable_has_no_effect_even_weakly():
    m, enc, s_in, _ = spekkens_ontic_dj_instruments()
    assert find_distinguishing_effect(m, enc, s_in, strict=True) is None
    assert find_distinguishing_effect(m, enc, s_in, strict=False) is None


def test_restricted_toy_bit_search_finds_witness_and_x_plus_works():
    m, enc, s_in, e_C = spekkens_epistemic_dj_instruments()
    witness = find_distinguishing_effect(m, enc, s_in, strict=True)
    assert witness is not None
    # the returned witness and the X=+1 effect both separate exactly
    for effect in (witness, Effect(np.eye(6)[0])):
        for spec in constant_balanced_specs(1):
            out = run_dj(m, spec, enc, s_in, effect)
            expected = 1.0 if classify(spec) == "constant" else 0.0
            assert out.p_constant_effect == pytest.approx(expected, abs=1e-9)


def test_quantum_candidate_is_the_plus_projector():
    m, enc, s_in, _ = quantum_dj_instruments(1)
    plus = np.full((2, 2), 0.5, dtype=complex)  # H |0><0| H expanded by hand
    accepted = find_distinguishing_effect(m, enc, s_in, strict=True, candidate=plus)
    assert accepted is plus
    bad = m.branch_state(0)
    assert find_distinguishing_effect(m, enc, s_in, strict=True, candidate=bad) is None


def test_effect_search_needs_polytope_or_candidate():
    m, enc, s_in, _ = quantum_dj_instruments(1)
    with pytest.raises(UnsupportedTheoryError):
        find_distinguishing_effect(m, enc, s_in, strict=True)


# -- global protocol (box world) ------------------------------------------------------------------


def test_global_x_flip_protocol_solves_the_one_bit_problem():
    m, x_flip, s_in, e_C = gbit_global_instruments()
    for spec in constant_balanced_specs(1):
        out = run_dj_with_global_oracle(m, spec, x_flip, s_in, e_C)
        assert out.p_constant_effect in (0.0, 1.0)
        assert out.verdict == classify(spec)


# -- ball runs ------------------------------------------------------------------------------------


@pytest.mark.parametrize("d", [3, 4, 5])
def test_ball_half_turn_runs_exactly(d):
    m, enc, s_in, e_C = ball_dj_instruments(dball_theory(d))
    for spec in constant_balanced_specs(1):
        out = run_dj(m, spec, enc, s_in, e_C)
        assert out.verdict == classify(spec)


def test_two_measurement_ball_has_no_encoding():
    with pytest.raises(UnsupportedTheoryError):
        ball_dj_instruments(dball_theory(2))


# -- quaternionic runs -------------------------------------------------------------------------------


@pytest.mark.parametrize("N", [2, 4, 8])
def test_quaternionic_runs_exact(N):
    m, enc, s_in, e_C = quaternionic_dj_instruments(N)
    n = int(math.log2(N))
    for spec in constant_balanced_specs(n):
        out = run_dj(m, spec, enc, s_in, e_C)
        assert out.verdict == classify(spec)
        closed = abs(sum((-1.0) ** b for b in spec.table)) ** 2 / float(N * N)
        assert out.p_constant_effect == pytest.approx(closed, abs=1e-9)


def test_quaternionic_dj_probabilities_match_quantum_entrywise():
    m_q, enc_q, s_q, e_q = quaternionic_dj_instruments(4)
    m_c, enc_c, s_c, e_c = quantum_dj_instruments(2)
    for spec in constant_balanced_specs(2):
        p_q = run_dj(m_q, spec, enc_q, s_q, e_q).p_constant_effect
        p_c = run_dj(m_c, spec, enc_c, s_c, e_c).p_constant_effect
        assert p_q == pytest.approx(p_c, abs=1e-9)


def test_negation_symmetry_for_signed_encodings():
    for instruments in (quantum_dj_instruments(2), quaternionic_dj_instruments(4)):
        m, enc, s_in, e_C = instruments
        effects = list(m.z_effects) + [e_C]
        for spec in constant_balanced_specs(2):
            negated = OracleSpec(2, tuple(1 - b for b in spec.table))
            out = run_dj(m, spec, enc, s_in, e_C)
            out_neg = run_dj(m, negated, enc, s_in, e_C)
            for e in effects:
                assert m.probability(e, out.output_state) == pytest.approx(
                    m.probability(e, out_neg.output_state), abs=1e-9
                )


def test_balanced_pair_survey_marks_negations_indistinguishable():
    m, enc, s_in, _ = quantum_dj_instruments(2)
    B = m.beamsplitter
    # the full post-beamsplitter measurement, one effect per output branch
    effects = [B @ z @ B for z in m.z_effects]
    rows = balanced_pair_distinguishability(m, enc, s_in, effects)
    assert len(rows) == 15  # C(6, 2) balanced pairs at n=2
    for row in rows:
        if row["negation"]:
            assert row["max_effect_gap"] <= 1e-12
        else:
            assert row["max_effect_gap"] > 0.1


# -- unordered search -----------------------------------------------------------------------------------


def test_four_branch_single_round_is_certain():
    m = quantum_theory(2)
    assert run_grover(m, GroverConfig(4, 2, 1)) == pytest.approx(1.0, abs=1e-12)


def test_two_branch_zero_rounds_is_even():
    m = quantum_theory(1)
    assert run_grover(m, GroverConfig(2, 1, 0)) == pytest.approx(0.5, abs=1e-12)


def test_sixteen_branch_three_rounds_matches_closed_form():
    m = quantum_theory(4)
    p = run_grover(m, GroverConfig(16, 7, 3))
    assert p == pytest.approx(math.sin(7.0 * math.asin(0.25)) ** 2, abs=1e-9)


@pytest.mark.parametrize("N,n", [(4, 2), (16, 4)])
def test_success_curve_matches_closed_form_and_wins_at_budget(N, n):
    m = quantum_theory(n)
    budget = grover_iteration_budget(N)
    curve = grover_success_curve(m, marked=N - 1, max_iterations=2 * budget)
    for k, p in enumerate(curve):
        assert p == pytest.approx(grover_closed_form(N, k), abs=1e-9)
    assert curve[budget] > 0.5


def test_quaternionic_search_reproduces_complex_search():
    budget = grover_iteration_budget(16)
    curve_c = grover_success_curve(quantum_theory(4), 5, 2 * budget)
    curve_q = grover_success_curve(quaternionic_theory(16), 5, 2 * budget)
    np.testing.assert_allclose(curve_q, curve_c, atol=1e-9)


def test_search_unsupported_without_beamsplitter():
    from gptifer.theories import spekkens_ontic_theory

    for m in (classical_theory(2), gbit_theory(2)):
        with pytest.raises(UnsupportedTheoryError) as err:
            run_grover(m, GroverConfig(2, 0, 1))
        assert "identity" in str(err.value)
    with pytest.raises(UnsupportedTheoryError) as err:
        run_grover(spekkens_ontic_theory(), GroverConfig(2, 0, 1))
    assert "2134" in str(err.value)  # the diagnosis lists what is localizable


def test_grover_config_validation():
    with pytest.raises(ValueError):
        GroverConfig(4, 4, 1)
    with pytest.raises(ValueError):
        GroverConfig(4, 0, -1)


# -- wire formats ---------------------------------------------------------------------------------------------


def test_oracle_spec_json_round_trip(tmp_path):
    spec = OracleSpec(2, (0, 1, 1, 0))
    assert json.loads(spec.to_json()) == {"n": 2, "table": [0, 1, 1, 0]}
    assert OracleSpec.from_json(spec.to_json()) == spec
    path = tmp_path / "oracle.json"
    spec.to_file(path)
    assert OracleSpec.from_file(path) == spec


def test_grover_config_json_round_trip():
    cfg = GroverConfig(16, 5, 3)
    assert json.loads(cfg.to_json()) == {"N": 16, "marked": 5, "iterations": 3}
    assert GroverConfig.from_json(cfg.to_json()) == cfg
