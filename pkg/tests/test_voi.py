import numpy as np
import pytest

from dualsig.core import ValidationError
from dualsig.voi import (
    DiscreteProblem,
    LogLoss,
    NULL_SIGNAL,
    QuadraticLoss,
    TableLoss,
    VoiReport,
    bayes_risk,
    binary_entropy,
    brute_force_voi,
    erasure_construction,
    marginal_value_discrete,
    posterior_two_tests,
    problem_from_table,
    problem_to_table,
    ratio_construction,
    value_of_information,
    xor_construction,
    xor_q_for_ratio,
)

from helpers import mutual_information_bits, variance_reduction

H2_01 = 0.4689955935892812          # binary entropy of 0.1 in bits
V_XOR_COND = 0.5310044064107188     # 1 - H2(0.1)
V_XOR_ALONE = 0.1187091007693073    # 1 - H2(0.3)
XOR_RATIO_01_025 = 4.473156674336565


def random_table_problem(rng, n_h=2, n_a=2):
    raw = rng.uniform(size=(2, n_h, n_a))
    probs = raw / raw.sum()
    return DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                           alphabets=(tuple(range(n_h)), tuple(range(n_a))),
                           probs=probs,
                           loss=TableLoss(decisions=(0, 1), loss=lambda y, d: float(y != d)))


class TestBinaryEntropy:
    def test_values(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == 1.0
        assert abs(binary_entropy(0.1) - H2_01) < 1e-15

    def test_symmetry(self):
        for p in np.linspace(0.01, 0.99, 25):
            assert abs(binary_entropy(p) - binary_entropy(1.0 - p)) < 1e-14

    def test_domain(self):
        with pytest.raises(ValidationError):
            binary_entropy(-0.1)


class TestProblemValidation:
    def test_probabilities_must_normalize(self):
        probs = np.full((2, 2, 2), 0.2)
        with pytest.raises(ValidationError):
            DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                            alphabets=((0, 1), (0, 1)), probs=probs, loss=LogLoss())

    def test_log_loss_needs_binary_states(self):
        probs = np.full((3, 1, 1), 1.0 / 3.0)
        with pytest.raises(ValidationError):
            DiscreteProblem(states=(0, 1, 2), signal_names=("h", "a"),
                            alphabets=((0,), (0,)), probs=probs, loss=LogLoss())

    def test_report_invariants(self):
        with pytest.raises(ValidationError):
            VoiReport(l0=1.0, v_h=0.5, v_a=0.2, v_joint=0.4,
                      v_a_given_h=-0.1, ratio=-0.5)


class TestBayesRisk:
    def test_empty_subset_gives_baseline(self):
        problem = xor_construction(0.1, 0.25)
        assert bayes_risk(problem, ()) == 1.0  # fair-coin entropy in bits
        assert value_of_information(problem, ()) == 0.0

    def test_perfectly_revealing_signal(self):
        probs = np.zeros((2, 2, 1))
        probs[0, 0, 0] = 0.5
        probs[1, 1, 0] = 0.5
        problem = DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                                  alphabets=((0, 1), (0,)), probs=probs, loss=LogLoss())
        assert bayes_risk(problem, ("h",)) == 0.0
        assert value_of_information(problem, ("h",)) == 1.0

    def test_uninformative_signal_is_worthless(self):
        probs = np.zeros((2, 2, 1))
        probs[:, :, 0] = 0.25
        problem = DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                                  alphabets=((0, 1), (0,)), probs=probs, loss=LogLoss())
        assert abs(value_of_information(problem, ("h",))) < 1e-15

    def test_xor_conditional_risk_relation(self):
        # with h observed, a is a p-noisy copy of y: risk H2(0.1)
        problem = xor_construction(0.1, 0.25)
        assert abs(bayes_risk(problem, ("h", "a")) - H2_01) < 1e-12


class TestInformationIdentities:
    def test_log_loss_value_equals_mutual_information(self):
        problem = xor_construction(0.1, 0.25)
        for signals in ((), ("h",), ("a",), ("h", "a")):
            assert abs(value_of_information(problem, signals)
                       - mutual_information_bits(problem, signals)) < 1e-12

    def test_quadratic_value_equals_variance_reduction(self):
        rng = np.random.default_rng(0)
        raw = rng.uniform(size=(3, 2, 3))
        probs = raw / raw.sum()
        problem = DiscreteProblem(states=(-1.0, 0.5, 2.0), signal_names=("h", "a"),
                                  alphabets=((0, 1), (0, 1, 2)), probs=probs,
                                  loss=QuadraticLoss())
        for signals in (("h",), ("a",), ("h", "a")):
            assert abs(value_of_information(problem, signals)
                       - variance_reduction(problem, signals)) < 1e-12

    def test_joint_dominates_singles(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            problem = random_table_problem(rng)
            report = marginal_value_discrete(problem)
            assert report.v_joint >= max(report.v_h, report.v_a) - 1e-12
            assert report.v_a_given_h >= -1e-12

    def test_superadditivity_equivalence_both_ways(self):
        # synergy case: the own signal unlocks the assistant signal
        xor = marginal_value_discrete(xor_construction(0.1, 0.25))
        assert xor.v_a_given_h > xor.v_a
        assert xor.v_joint > xor.v_a + xor.v_h
        # redundancy case: two independent noisy copies saturate at 1 bit
        probs = np.zeros((2, 2, 2))
        for y, h, a in np.ndindex(2, 2, 2):
            probs[y, h, a] = 0.5 * (0.1 if h != y else 0.9) * (0.1 if a != y else 0.9)
        problem = DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                                  alphabets=((0, 1), (0, 1)), probs=probs, loss=LogLoss())
        report = marginal_value_discrete(problem)
        assert report.v_joint > report.v_h
        assert report.v_a_given_h < report.v_a
        assert report.v_joint < report.v_a + report.v_h


class TestConstructions:
    def test_xor_report_values(self):
        report = marginal_value_discrete(xor_construction(0.1, 0.25))
        assert abs(report.v_a_given_h - V_XOR_COND) < 1e-12
        assert abs(report.v_a - V_XOR_ALONE) < 1e-12
        assert abs(report.ratio - XOR_RATIO_01_025) < 1e-10

    def test_xor_ratio_one_at_zero_q(self):
        report = marginal_value_discrete(xor_construction(0.1, 0.0))
        assert abs(report.ratio - 1.0) < 1e-12

    def test_xor_ratio_grows_toward_half(self):
        ratios = [marginal_value_discrete(xor_construction(0.1, q)).ratio
                  for q in (0.0, 0.2, 0.35, 0.45, 0.49)]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] > 50.0

    def test_erasure_exact_ratio(self):
        report = marginal_value_discrete(erasure_construction(0.1, 0.4))
        assert abs(report.ratio - 0.4) < 1e-12
        assert abs(report.v_a_given_h - 0.21240176256428753) < 1e-12

    def test_erasure_t_zero_no_conditional_value(self):
        report = marginal_value_discrete(erasure_construction(0.1, 0.0))
        assert abs(report.v_a_given_h) < 1e-12

    def test_erasure_ratio_monotone_in_t(self):
        ratios = [marginal_value_discrete(erasure_construction(0.1, t)).ratio
                  for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))

    def test_ratio_construction_hits_targets(self):
        for target in (0.0, 0.3, 1.0, 2.0, 10.0):
            problem = ratio_construction(target)
            report = marginal_value_discrete(problem)
            observed = 0.0 if report.v_a_given_h == 0.0 else report.ratio
            assert abs(observed - target) < 1e-9

    def test_xor_q_solver_range(self):
        assert xor_q_for_ratio(1.0) == 0.0
        with pytest.raises(ValidationError):
            xor_q_for_ratio(0.5)
        q = xor_q_for_ratio(3.0)
        assert 0.0 < q < 0.5

    def test_construction_parameter_domains(self):
        with pytest.raises(ValidationError):
            xor_construction(0.0, 0.2)
        with pytest.raises(ValidationError):
            xor_construction(0.1, 0.5)
        with pytest.raises(ValidationError):
            erasure_construction(0.1, 1.0)


class TestPosteriorTwoTests:
    def test_reference_numbers(self):
        single, both = posterior_two_tests(0.001, 0.7, 0.01)
        assert abs(single - 0.06548175865294668) < 1e-15
        assert abs(both - 0.8306492625868791) < 1e-15

    def test_uninformative_test(self):
        single, both = posterior_two_tests(0.5, 0.3, 0.3)
        assert single == 0.5 and both == 0.5

    def test_near_perfect_test(self):
        _, both = posterior_two_tests(0.2, 0.999999, 1e-9)
        assert both > 0.999999

    def test_domain(self):
        with pytest.raises(ValidationError):
            posterior_two_tests(0.0, 0.7, 0.01)


class TestBruteForce:
    def test_matches_closed_form_on_xor(self):
        closed = marginal_value_discrete(xor_construction(0.1, 0.25))
        brute = brute_force_voi(xor_construction(0.1, 0.25))
        for field in ("l0", "v_h", "v_a", "v_joint", "v_a_given_h"):
            assert abs(getattr(closed, field) - getattr(brute, field)) < 1e-9

    def test_matches_fast_path_on_random_table_problems(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            problem = random_table_problem(rng, n_h=rng.integers(2, 4))
            closed = marginal_value_discrete(problem)
            brute = brute_force_voi(problem)
            for field in ("l0", "v_h", "v_a", "v_joint", "v_a_given_h"):
                assert abs(getattr(closed, field) - getattr(brute, field)) < 1e-9

    def test_constant_loss_makes_information_worthless(self):
        probs = np.full((2, 2, 2), 0.125)
        problem = DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                                  alphabets=((0, 1), (0, 1)), probs=probs,
                                  loss=TableLoss(decisions=("only",), loss=lambda y, d: 1.0))
        report = brute_force_voi(problem)
        assert report.v_h == report.v_a == report.v_joint == 0.0

    def test_guard_rejects_huge_problems(self):
        n = 40
        probs = np.full((2, n, n), 1.0 / (2 * n * n))
        problem = DiscreteProblem(states=(0, 1), signal_names=("h", "a"),
                                  alphabets=(tuple(range(n)), tuple(range(n))),
                                  probs=probs, loss=QuadraticLoss())
        with pytest.raises(ValidationError):
            brute_force_voi(problem)


class TestSerialization:
    def test_round_trip_xor(self):
        problem = xor_construction(0.1, 0.25)
        text = problem_to_table(problem)
        back = problem_from_table(text, LogLoss())
        assert back.states == problem.states
        assert back.signal_names == problem.signal_names
        assert back.alphabets == problem.alphabets
        assert np.array_equal(back.probs, problem.probs)

    def test_round_trip_with_null_symbol(self):
        problem = erasure_construction(0.1, 0.4)
        back = problem_from_table(problem_to_table(problem), LogLoss())
        assert NULL_SIGNAL in back.alphabets[0]
        assert np.array_equal(back.probs, problem.probs)

    def test_malformed_tables_rejected(self):
        with pytest.raises(ValidationError):
            problem_from_table("", LogLoss())
        with pytest.raises(ValidationError):
            problem_from_table("state,h,a,prob\n0,0\n", LogLoss())
