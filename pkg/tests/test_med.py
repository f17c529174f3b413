"""The partition distribution: pmf forms, predictive rule, sampler, moments."""

import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewensbayes.errors import DomainError, InvalidPartitionError
from ewensbayes.med import (
    Partition,
    crp_predictive,
    expected_k,
    fisher_information,
    log_pmf_config,
    log_pmf_sizes,
    log_prob_k,
    log_prob_k_row,
    sample_partition,
    variance_k,
)
from ewensbayes.special import trigamma

from oracles import set_partitions


class TestPartition:
    def test_canonical_order(self):
        p = Partition(n=6, sizes=(1, 3, 2))
        assert p.sizes == (3, 2, 1)
        assert p.k == 3

    def test_multiplicities(self):
        r = Partition(n=7, sizes=(3, 2, 1, 1)).multiplicities()
        assert r == {3: 1, 2: 1, 1: 2}
        assert sum(r.values()) == 4
        assert sum(j * rj for j, rj in r.items()) == 7

    def test_empty_partition_allowed(self):
        assert Partition(n=0).k == 0

    def test_invalid(self):
        with pytest.raises(InvalidPartitionError):
            Partition(n=3, sizes=(2, 2))
        with pytest.raises(InvalidPartitionError):
            Partition(n=2, sizes=(2, 0))


class TestLogPmfSizes:
    def test_single_cluster_n3(self):
        assert log_pmf_sizes(Partition(3, (3,)), 1.0) == pytest.approx(
            math.log(1.0 / 3.0), abs=1e-12
        )

    def test_single_item_probability_one(self):
        for beta in (0.2, 1.0, 57.0):
            assert log_pmf_sizes(Partition(1, (1,)), beta) == pytest.approx(0.0, abs=1e-12)

    def test_two_singletons(self):
        # beta/(beta+1) with beta=2
        assert log_pmf_sizes(Partition(2, (1, 1)), 2.0) == pytest.approx(
            math.log(2.0 / 3.0), abs=1e-12
        )

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            log_pmf_sizes(Partition(3, (3,)), 0.0)
        with pytest.raises(InvalidPartitionError):
            log_pmf_sizes(Partition(0), 1.0)


class TestLogPmfConfig:
    def test_two_singletons(self):
        assert log_pmf_config(2, {1: 2}, 1.0) == pytest.approx(math.log(0.5), abs=1e-12)

    def test_one_pair(self):
        assert log_pmf_config(2, {2: 1}, 1.0) == pytest.approx(math.log(0.5), abs=1e-12)

    def test_complementary_configs_sum_to_one(self):
        total = math.exp(log_pmf_config(2, {1: 2}, 1.0)) + math.exp(
            log_pmf_config(2, {2: 1}, 1.0)
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_triple(self):
        assert log_pmf_config(3, {3: 1}, 1.0) == pytest.approx(
            math.log(1.0 / 3.0), abs=1e-12
        )

    def test_constraint_violation(self):
        with pytest.raises(InvalidPartitionError):
            log_pmf_config(3, {2: 1}, 1.0)


def _multiplicity_key(blocks):
    return tuple(sorted(Counter(len(b) for b in blocks).items()))


class TestEnumerationConsistency:
    @pytest.mark.parametrize("beta", [0.3, 1.0, 4.0])
    @pytest.mark.parametrize("n", range(1, 9))
    def test_pmf_sums_to_one_over_set_partitions(self, n, beta):
        total = sum(
            math.exp(log_pmf_sizes(Partition(n, tuple(len(b) for b in blocks)), beta))
            for blocks in set_partitions(list(range(n)))
        )
        assert total == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_config_equals_sizes_times_labeling_count(self, n):
        beta = 1.7
        counts = Counter(
            _multiplicity_key(blocks) for blocks in set_partitions(list(range(n)))
        )
        for key, count in counts.items():
            r = dict(key)
            sizes = tuple(j for j, rj in r.items() for _ in range(rj))
            lhs = log_pmf_config(n, r, beta)
            rhs = log_pmf_sizes(Partition(n, sizes), beta) + math.log(count)
            assert lhs == pytest.approx(rhs, abs=1e-10)
            # the enumerated count matches the closed-form multinomial count
            explicit = math.factorial(n)
            for j, rj in r.items():
                explicit //= math.factorial(j) ** rj * math.factorial(rj)
            assert count == explicit


class TestCrpPredictive:
    def test_one_cluster(self):
        probs = crp_predictive(Partition(2, (2,)), 1.0)
        assert probs == pytest.approx([2.0 / 3.0, 1.0 / 3.0], abs=1e-12)

    def test_first_customer(self):
        probs = crp_predictive(Partition(0), 5.0)
        assert probs == pytest.approx([1.0], abs=1e-15)

    def test_two_clusters(self):
        probs = crp_predictive(Partition(3, (2, 1)), 2.0)
        assert probs == pytest.approx([0.4, 0.2, 0.4], abs=1e-12)

    @given(
        st.lists(st.integers(min_value=1, max_value=9), min_size=1, max_size=8),
        st.floats(min_value=0.01, max_value=100.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_sums_to_one(self, sizes, beta):
        probs = crp_predictive(Partition(sum(sizes), tuple(sizes)), beta)
        assert np.all(probs >= 0.0)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)


class TestSamplePartition:
    def test_tiny_beta_one_cluster(self):
        p = sample_partition(10, 1e-12, np.random.default_rng(0))
        assert p.sizes == (10,)

    def test_huge_beta_all_singletons(self):
        p = sample_partition(10, 1e12, np.random.default_rng(0))
        assert p.sizes == tuple([1] * 10)

    def test_k_one_frequency_n4(self):
        # Pr(K=1 | beta=1, n=4) = |s(4,1)| * 1 / 4! = 6/24 = 1/4
        rng = np.random.default_rng(123)
        draws = 100_000
        hits = sum(sample_partition(4, 1.0, rng).k == 1 for _ in range(draws))
        p_hat = hits / draws
        se = math.sqrt(0.25 * 0.75 / draws)
        assert abs(p_hat - 0.25) < 3 * se

    def test_deterministic_given_seed(self):
        a = sample_partition(40, 2.0, np.random.default_rng(99))
        b = sample_partition(40, 2.0, np.random.default_rng(99))
        assert a.sizes == b.sizes

    @pytest.mark.parametrize("n,beta", [(50, 1.0), (100, 2.0)])
    def test_mean_k_matches_expected(self, n, beta):
        rng = np.random.default_rng(7)
        draws = 100_000
        ks = np.fromiter(
            (sample_partition(n, beta, rng).k for _ in range(draws)), dtype=float
        )
        se = ks.std(ddof=1) / math.sqrt(draws)
        assert abs(ks.mean() - expected_k(beta, n)) < 4 * se


class TestMomentsOfK:
    def test_expected_k_simple(self):
        assert expected_k(1.0, 3) == pytest.approx(11.0 / 6.0, abs=1e-12)

    def test_n_one(self):
        assert expected_k(3.3, 1) == pytest.approx(1.0, abs=1e-14)
        assert variance_k(3.3, 1) == pytest.approx(0.0, abs=1e-14)

    def test_variance_simple(self):
        assert variance_k(1.0, 2) == pytest.approx(0.25, abs=1e-12)

    def test_fisher_equals_variance_identity(self):
        # I(beta) = Var[K|beta,n] / beta^2
        for beta in (0.5, 1.0, 3.0):
            for n in (2, 5, 20):
                assert fisher_information(beta, n) == pytest.approx(
                    variance_k(beta, n) / beta**2, rel=1e-12
                )


class TestLogProbK:
    def test_n2_k1(self):
        assert log_prob_k(2, 1, 1.0) == pytest.approx(math.log(0.5), abs=1e-12)

    def test_n3_k3(self):
        assert log_prob_k(3, 3, 1.0) == pytest.approx(math.log(1.0 / 6.0), abs=1e-12)

    def test_normalization(self):
        total = np.exp(log_prob_k_row(5, 0.7)).sum()
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_matches_partition_enumeration(self):
        n, beta = 6, 1.4
        by_k = np.zeros(n + 1)
        for blocks in set_partitions(list(range(n))):
            sizes = tuple(len(b) for b in blocks)
            by_k[len(blocks)] += math.exp(log_pmf_sizes(Partition(n, sizes), beta))
        for k in range(1, n + 1):
            assert log_prob_k(n, k, beta) == pytest.approx(
                math.log(by_k[k]), abs=1e-9
            )


class TestFisherInformationMonteCarlo:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 3.0])
    @pytest.mark.parametrize("n", [2, 5, 20])
    def test_curvature_average_matches_information(self, n, beta):
        # -d^2/dbeta^2 log pmf = psi'(beta+n) - psi'(beta) + K/beta^2 per draw
        rng = np.random.default_rng(2024)
        draws = 100_000
        const = trigamma(beta + n) - trigamma(beta)
        ks = np.fromiter(
            (sample_partition(n, beta, rng).k for _ in range(draws)), dtype=float
        )
        stats = const + ks / beta**2
        se = stats.std(ddof=1) / math.sqrt(draws)
        assert abs(stats.mean() - fisher_information(beta, n)) < 4 * se
