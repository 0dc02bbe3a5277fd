import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from phaseamp import (
    DistributionSpec,
    DomainError,
    InjectiveSpec,
    ObjectiveTable,
    TableParseError,
    absorb_constraint,
    load_table,
    make_injective,
    sample_distribution,
    shift_nonnegative,
    write_table,
)
from phaseamp.objective import raw_samples

finite = st.floats(-1e6, 1e6, allow_nan=False)


class TestInjective:
    @pytest.mark.parametrize(
        "kind,n,expected",
        [
            ("quadratic", 16, [x * x for x in range(16)]),
            ("linear", 4, [0, 1, 2, 3]),
            ("cubic", 5, [0, 1, 8, 27, 64]),
        ],
    )
    def test_enumeration(self, kind, n, expected):
        np.testing.assert_array_equal(make_injective(InjectiveSpec(kind, n)).values, expected)

    def test_exp10_top_value(self):
        t = make_injective(InjectiveSpec("exp10", 10))
        assert t.values[-1] == 511.0
        assert t.values[0] == 0.0

    def test_scale_divisor_halves_linear(self):
        t = make_injective(InjectiveSpec("linear", 6, scale_divisor=2))
        np.testing.assert_array_equal(t.values, [0, 0.5, 1, 1.5, 2, 2.5])

    @pytest.mark.parametrize("kind", ["linear", "quadratic", "cubic", "exp10"])
    def test_strictly_increasing(self, kind):
        v = make_injective(InjectiveSpec(kind, 1000)).values
        assert np.all(np.diff(v) > 0)
        assert make_injective(InjectiveSpec(kind, 1000)).solution_set.tolist() == [999]

    def test_cubic_overflow_refused(self):
        with pytest.raises(DomainError, match="2\\^26"):
            InjectiveSpec("cubic", 2**26 + 1)
        InjectiveSpec("cubic", 2**26)

    @pytest.mark.parametrize("bad", [dict(kind="sine", n_states=4), dict(kind="linear", n_states=1),
                                     dict(kind="linear", n_states=8, scale_divisor=0)])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            InjectiveSpec(**bad)


class TestSampling:
    @pytest.mark.parametrize("kw", [dict(kind="normal", sigma=0.0), dict(kind="normal", sigma=-1.0),
                                    dict(kind="skew_normal", sigma=0.0), dict(kind="exponential", lam=0.0),
                                    dict(kind="exponential", lam=-2.0), dict(kind="skew_normal", alpha=math.inf),
                                    dict(kind="gamma")])
    def test_invalid_parameters(self, kw):
        with pytest.raises(DomainError):
            DistributionSpec(**kw)

    def test_normal_skewness_vanishes(self):
        x = raw_samples(DistributionSpec("normal", sigma=10.0, seed=3), 10**6)
        assert abs(stats.skew(x)) < 0.01

    def test_skew_normal_alpha_zero_is_normal(self):
        a = raw_samples(DistributionSpec("skew_normal", mu=1.0, sigma=2.0, alpha=0.0, seed=11), 10**5)
        b = raw_samples(DistributionSpec("normal", mu=1.0, sigma=2.0, seed=12), 10**5)
        d = stats.ks_2samp(a, b).statistic
        n = 10**5
        critical = 1.628 * math.sqrt(2.0 / n)  # two-sample KS, 1% level
        assert d < critical

    @pytest.mark.parametrize("lam", [0.5, 1.0, 4.0])
    def test_exponential_mean(self, lam):
        n = 10**5
        x = raw_samples(DistributionSpec("exponential", lam=lam, seed=5), n)
        assert abs(x.mean() - 1 / lam) < 3 * (1 / lam) / math.sqrt(n)

    def test_large_alpha_approaches_half_normal(self):
        mu = 2.0
        x = raw_samples(DistributionSpec("skew_normal", mu=mu, sigma=1.0, alpha=50.0, seed=9), 10**5)
        below = np.mean(x < mu)
        # exact mass below the location for alpha=50; zero in the half-normal limit
        exact = stats.skewnorm.cdf(mu, 50.0, loc=mu)
        assert below < 0.01
        assert abs(below - exact) < 0.01

    def test_seed_determinism(self):
        spec = DistributionSpec("skew_normal", sigma=10.0, alpha=5.0, seed=2**63 + 17)
        a = sample_distribution(spec, 4096).values
        b = sample_distribution(spec, 4096).values
        assert a.tobytes() == b.tobytes()
        c = sample_distribution(DistributionSpec("skew_normal", sigma=10.0, alpha=5.0, seed=1), 4096).values
        assert a.tobytes() != c.tobytes()

    def test_sorting_preserves_multiset(self):
        spec = DistributionSpec("exponential", lam=2.0, seed=4)
        raw = raw_samples(spec, 1000)
        table = sample_distribution(spec, 1000)
        np.testing.assert_allclose(table.values, np.sort(raw) - raw.min(), rtol=0, atol=1e-12)

    def test_quantile_normal_is_symmetric(self):
        t = sample_distribution(DistributionSpec("normal", sigma=10.0, method="quantile"), 2**12)
        np.testing.assert_allclose(t.values + t.values[::-1], t.f_max, atol=1e-9)

    def test_descriptor_records_generator(self):
        t = sample_distribution(DistributionSpec("normal", seed=42), 16)
        assert t.descriptor["seed"] == 42
        assert "Philox" in t.descriptor["generator"]


class TestCanonical:
    @pytest.mark.parametrize("raw,expected", [([-3, 0, 2], [0, 3, 5]), ([0, 1, 2], [0, 1, 2]), ([4, 7], [0, 3])])
    def test_shift_nonnegative(self, raw, expected):
        np.testing.assert_array_equal(shift_nonnegative(raw), expected)

    @given(arrays(np.float64, st.integers(2, 60), elements=finite))
    def test_canonicalization_idempotent(self, v):
        t = ObjectiveTable.from_values(v)
        again = ObjectiveTable.from_values(t.values)
        assert again.values.tobytes() == t.values.tobytes()
        assert t.values[0] == 0.0 and np.all(np.diff(t.values) >= 0)

    def test_ties_form_solution_set(self):
        t = ObjectiveTable.from_values([3.0, 1.0, 3.0, 0.0])
        assert t.solution_set.tolist() == [2, 3]
        assert t.worst_set.tolist() == [0]

    def test_table_is_read_only(self):
        t = ObjectiveTable.from_values([1.0, 2.0])
        with pytest.raises(ValueError):
            t.values[0] = 5.0

    @pytest.mark.parametrize("values", [[1.0], [0.0, np.nan], [0.0, np.inf]])
    def test_rejects_bad_values(self, values):
        with pytest.raises(DomainError):
            ObjectiveTable.from_values(values)

    def test_constructor_requires_canonical_form(self):
        with pytest.raises(DomainError):
            ObjectiveTable(np.array([1.0, 2.0]))


class TestConstraint:
    def test_substitution(self):
        np.testing.assert_array_equal(absorb_constraint([5, 3, 8], [1, 0, 1], 10), [5, -7, 8])

    def test_all_feasible_unchanged(self):
        np.testing.assert_array_equal(absorb_constraint([5, 3, 8], [1, 1, 1], 10), [5, 3, 8])

    def test_small_pair(self):
        np.testing.assert_array_equal(absorb_constraint([0, 1], [0, 1], 2), [-2, 1])

    def test_too_small_c_names_minimum(self):
        with pytest.raises(DomainError, match="need C > 5"):
            absorb_constraint([5, 3, 8], [1, 0, 1], 5)

    @given(st.lists(st.tuples(st.floats(-100, 100), st.booleans()), min_size=2, max_size=30),
           st.floats(0.001, 50.0))
    def test_separation(self, rows, margin):
        f = np.array([r[0] for r in rows])
        g = np.array([r[1] for r in rows])
        C = float(f.max() - f.min()) + margin
        out = absorb_constraint(f, g, C)
        if g.any() and (~g).any():
            assert out[g].min() > out[~g].max()


class TestFiles:
    @pytest.mark.parametrize("text,expected", [("0\n1\n2\n", [0, 1, 2]), ("2\n0\n1\n", [0, 1, 2]),
                                               ("# header\n\n5\n  7 \n", [0, 2])])
    def test_load(self, tmp_path, text, expected):
        p = tmp_path / "f.txt"
        p.write_text(text)
        t = load_table(p)
        np.testing.assert_array_equal(t.values, expected)
        assert t.n_states == len(expected)

    @pytest.mark.parametrize("text,line", [("1\nNaN\n", 2), ("0\n# c\nabc\n", 3), ("1\n2\ninf\n", 3)])
    def test_parse_errors_carry_line(self, tmp_path, text, line):
        p = tmp_path / "f.txt"
        p.write_text(text)
        with pytest.raises(TableParseError, match=f"line {line}") as err:
            load_table(p)
        assert err.value.lineno == line

    def test_too_few_values(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_text("# only\n3\n")
        with pytest.raises(TableParseError):
            load_table(p)

    @given(arrays(np.float64, st.integers(2, 40), elements=finite))
    def test_write_load_round_trip(self, tmp_path_factory, v):
        p = tmp_path_factory.mktemp("rt") / "t.txt"
        write_table(p, v, header="round trip")
        assert p.read_text().startswith("# round trip\n")
        assert load_table(p).values.tobytes() == ObjectiveTable.from_values(v).values.tobytes()
