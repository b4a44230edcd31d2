import json
from math import gcd

import numpy as np
import pytest

from expsumlab.errors import (
    ModuliNotCoprime, NotInvertible, NotPrime, NotSquarefree, SpecFormatError,
)
from expsumlab.spectral import dft_normalized
from expsumlab.trace import (
    AffinePullback, ArtinSchreier, CRTProduct, HyperKloosterman, Kummer,
    PointwiseProduct, RawTable, Scale, hyper_kloosterman_composite,
    hyper_kloosterman_direct, hyper_kloosterman_table, is_good,
    kloosterman_factorize, kloosterman_sum, read_table_csv, realize,
    spec_from_dict, spec_to_dict, twisted_multiplicativity_check,
    write_table_csv,
)
from expsumlab.zmod import euler_phi, inverse_mod, sieve_primes

RNG = np.random.default_rng(11)


def kloosterman_enumerate(a, b, c):
    """Literal scalar-loop oracle."""
    total = 0j
    for x in range(1, c + 1):
        if gcd(x, c) != 1:
            continue
        xbar = pow(x, -1, c)
        total += np.exp(2j * np.pi * ((a * x + b * xbar) % c) / c)
    return total if c > 1 else 1 + 0j


class TestKloostermanSum:
    def test_c2(self):
        assert abs(kloosterman_sum(1, 1, 2) - 1) < 1e-12

    def test_c3(self):
        # e(2/3) + e(1/3) = -1
        assert abs(kloosterman_sum(1, 1, 3) - (-1)) < 1e-12

    @pytest.mark.parametrize("c", [1, 2, 6, 12, 30])
    def test_ramanujan_at_zero(self, c):
        assert abs(kloosterman_sum(0, 0, c) - euler_phi(c)) < 1e-9

    @pytest.mark.parametrize("a,b,c", [(1, 1, 5), (2, 3, 9), (7, 11, 24)])
    def test_matches_enumeration(self, a, b, c):
        assert abs(kloosterman_sum(a, b, c) - kloosterman_enumerate(a, b, c)) < 1e-10


class TestKloostermanFactorize:
    def test_example(self):
        left, right = kloosterman_factorize(1, 1, 3, 5)
        assert abs(left * right - kloosterman_sum(1, 1, 15)) < 1e-9

    def test_unit_modulus(self):
        left, right = kloosterman_factorize(1, 1, 1, 7)
        assert left == 1
        assert abs(right - kloosterman_sum(1, 1, 7)) < 1e-12

    def test_not_coprime(self):
        with pytest.raises(ModuliNotCoprime):
            kloosterman_factorize(1, 1, 2, 2)

    def test_random_pairs(self):
        for _ in range(60):
            m = int(RNG.integers(1, 100))
            n = int(RNG.integers(1, 100))
            if gcd(m, n) != 1:
                continue
            a = int(RNG.integers(0, m * n))
            b = int(RNG.integers(0, m * n))
            left, right = kloosterman_factorize(a, b, m, n)
            assert abs(left * right - kloosterman_sum(a, b, m * n)) <= 1e-9


class TestHyperKloosterman:
    def test_kl2_p3(self):
        t = hyper_kloosterman_table(2, 3)
        assert abs(t.values[1] - (-1 / np.sqrt(3))) < 1e-12

    def test_kl3_p2(self):
        # single tuple (1,1,1): e(3/2) = -1, normalized by 2
        assert abs(hyper_kloosterman_table(3, 2).values[1] - (-0.5)) < 1e-12

    def test_zero_at_zero(self):
        for k in (2, 3, 4):
            assert hyper_kloosterman_table(k, 13).values[0] == 0

    @pytest.mark.parametrize("k,p", [(2, 7), (3, 11), (4, 11)])
    def test_matches_direct(self, k, p):
        t = hyper_kloosterman_table(k, p)
        for a in range(p):
            assert abs(t.values[a] - hyper_kloosterman_direct(k, a, p)) < 1e-9

    def test_kl2_real(self):
        for p in (13, 101):
            assert np.abs(hyper_kloosterman_table(2, p).values.imag).max() < 1e-9

    def test_deligne_spot(self):
        for p in (13, 101, 199):
            for k in (2, 3, 4):
                assert hyper_kloosterman_table(k, p).supnorm <= k

    def test_one_param_link(self):
        # Kl2(a; p) = S(1, a; p) / sqrt(p) for a != 0
        p = 11
        t = hyper_kloosterman_table(2, p)
        for a in range(1, p):
            assert abs(t.values[a] - kloosterman_sum(1, a, p) / np.sqrt(p)) < 1e-10


class TestHyperKloostermanComposite:
    def test_prime_is_table_entry(self):
        assert abs(hyper_kloosterman_composite(2, 5, 13)
                   - hyper_kloosterman_table(2, 13).values[5]) < 1e-12

    def test_q15_direct(self):
        q = 15
        direct = sum(
            np.exp(2j * np.pi * ((x + pow(x, -1, q)) % q) / q)
            for x in range(1, q) if gcd(x, q) == 1
        ) / np.sqrt(q)
        assert abs(hyper_kloosterman_composite(2, 1, 15) - direct) < 1e-9

    def test_not_squarefree(self):
        with pytest.raises(NotSquarefree):
            hyper_kloosterman_composite(2, 1, 12)


class TestKummer:
    def test_multiplicative_exhaustive(self):
        for p in sieve_primes(101):
            if p == 2:
                continue
            t = realize(Kummer(p, 1)).values
            x = np.arange(1, p)
            prod_table = t[np.outer(x, x) % p]
            assert np.abs(prod_table - np.outer(t[x], t[x])).max() < 1e-9

    def test_unit_modulus_values(self):
        t = realize(Kummer(13, 5))
        assert t.values[0] == 0
        assert np.abs(np.abs(t.values[1:]) - 1).max() < 1e-12

    def test_trivial_iff_e0(self):
        assert Kummer(7, 0).is_trivial()
        assert not Kummer(7, 3).is_trivial()


class TestRealize:
    def test_crt_example(self):
        spec = CRTProduct(Kummer(3, 1), RawTable(5, (1,) * 5, "const"))
        t = realize(spec)
        # at n = 7: chi(7 mod 3) = chi(1) = 1
        assert abs(t.values[7] - 1) < 1e-12

    def test_identity_pullback(self):
        inner = Kummer(7, 2)
        assert np.array_equal(realize(AffinePullback(1, 0, inner)).values,
                              realize(inner).values)

    def test_crt_is_pointwise_product(self):
        spec = CRTProduct(HyperKloosterman(3, 2), HyperKloosterman(5, 2))
        t = realize(spec)
        t0 = realize(HyperKloosterman(3, 2)).values
        t1 = realize(HyperKloosterman(5, 2)).values
        for n in range(15):
            assert abs(t.values[n] - t0[n % 3] * t1[n % 5]) < 1e-12

    def test_scale(self):
        inner = realize(Kummer(11, 1))
        scaled = realize(Scale(3, Kummer(11, 1)))
        for x in range(11):
            assert scaled.values[x] == inner.values[3 * x % 11]

    def test_artin_schreier(self):
        t = realize(ArtinSchreier(7, (0, 1)))
        x = np.arange(7)
        assert np.abs(t.values - np.exp(2j * np.pi * x / 7)).max() < 1e-12

    def test_supnorm_bounds(self):
        assert abs(realize(Kummer(13, 1)).supnorm - 1) < 1e-12
        for k in (2, 3, 4):
            assert hyper_kloosterman_table(k, 31).supnorm <= k

    def test_pullback_requires_unit_slope(self):
        with pytest.raises(NotInvertible):
            AffinePullback(7, 0, Kummer(7, 1))


class TestGoodness:
    def test_whitelist(self):
        assert is_good(Kummer(7, 1))
        assert not is_good(Kummer(7, 0))
        assert is_good(HyperKloosterman(7, 4))
        assert is_good(Scale(2, HyperKloosterman(7, 2)))
        assert is_good(AffinePullback(2, 3, Kummer(7, 1)))
        assert not is_good(ArtinSchreier(7, (0, 1)))
        assert not is_good(ArtinSchreier(7, (0, 0, 1)))
        assert not is_good(PointwiseProduct((Kummer(7, 1), Kummer(7, 2))))
        assert not is_good(RawTable(3, (1, 1, 1)))
        assert not is_good(CRTProduct(Kummer(3, 1), Kummer(5, 1)))


class TestTwistedMultiplicativity:
    def test_spec_example_indices(self):
        # q0=3, q1=5, x=7: rhs arguments are 2 mod 3 and 4 mod 5
        q0, q1, x = 3, 5, 7
        assert x * inverse_mod(q1, q0) % q0 == 2
        assert x * inverse_mod(q0, q1) % q1 == 4
        k0 = realize(Kummer(3, 1))
        k1 = realize(Kummer(5, 1))
        lhs, rhs = twisted_multiplicativity_check(k0, k1, x)
        hat0 = dft_normalized(k0.table).values
        hat1 = dft_normalized(k1.table).values
        assert abs(rhs - hat0[2] * hat1[4]) < 1e-12
        assert abs(lhs - rhs) <= 1e-9

    def test_constant_factor_degenerates(self):
        k0 = realize(RawTable(4, (1, 1, 1, 1), "const"))
        k1 = realize(Kummer(7, 1))
        for x in range(28):
            lhs, rhs = twisted_multiplicativity_check(k0, k1, x)
            assert abs(lhs - rhs) <= 1e-9

    def test_random(self):
        for _ in range(20):
            q0 = int(RNG.choice([3, 5, 7, 11, 13]))
            q1 = int(RNG.integers(2, 50))
            if gcd(q0, q1) != 1:
                continue
            k0 = realize(RawTable(q0, tuple(map(complex, RNG.normal(size=q0))), "r"))
            k1 = realize(RawTable(q1, tuple(map(complex, RNG.normal(size=q1))), "r"))
            x = int(RNG.integers(0, q0 * q1))
            lhs, rhs = twisted_multiplicativity_check(k0, k1, x)
            assert abs(lhs - rhs) <= 1e-9

    def test_not_coprime(self):
        k0 = realize(Kummer(3, 1))
        k1 = realize(RawTable(6, (1,) * 6, "c"))
        with pytest.raises(ModuliNotCoprime):
            twisted_multiplicativity_check(k0, k1, 1)


class TestSerialization:
    def test_spec_dict_roundtrip(self):
        specs = [
            Kummer(7, 3),
            ArtinSchreier(5, (1, 2, 3)),
            HyperKloosterman(11, 4),
            AffinePullback(2, 1, Kummer(7, 1)),
            Scale(3, HyperKloosterman(5, 2)),
            PointwiseProduct((Kummer(7, 1), Kummer(7, 2))),
            CRTProduct(Kummer(3, 1), RawTable(4, (1, 0, 1, 0))),
        ]
        for s in specs:
            assert spec_from_dict(json.loads(json.dumps(spec_to_dict(s)))) == s

    def test_missing_key_named(self):
        with pytest.raises(SpecFormatError, match="variant"):
            spec_from_dict({"p": 7})
        with pytest.raises(SpecFormatError, match="'k'"):
            spec_from_dict({"variant": "hyper_kloosterman", "p": 7})

    def test_unknown_variant(self):
        with pytest.raises(SpecFormatError, match="variant"):
            spec_from_dict({"variant": "mystery"})

    def test_table_csv_roundtrip(self, tmp_path):
        t = realize(Kummer(13, 2))
        path = tmp_path / "table.csv"
        write_table_csv(t, str(path))
        back = read_table_csv(str(path))
        assert back.modulus == 13
        assert np.abs(back.values - t.values).max() < 1e-15
        header = path.read_text().splitlines()[0]
        assert header == "modulus,13"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope,13\n")
        with pytest.raises(SpecFormatError):
            read_table_csv(str(path))


def test_invalid_specs():
    with pytest.raises(NotPrime):
        Kummer(6, 1)
    with pytest.raises(ModuliNotCoprime):
        CRTProduct(Kummer(3, 1), RawTable(6, (1,) * 6))
    with pytest.raises(ValueError):
        HyperKloosterman(7, 1)
