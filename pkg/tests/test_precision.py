import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lselab.precision import (
    ArithmeticContext,
    FloatFormat,
    format_params,
    round_to_format,
)


@pytest.fixture(scope="module")
def fp16():
    return format_params("fp16")


@pytest.fixture(scope="module")
def bf16():
    return format_params("bfloat16")


from conftest import match_3sf


def sig3(v):
    return float(f"{v:.3g}")


class TestFormatParams:
    # reference values to three significant figures
    TABLE = {
        "fp16": dict(u=4.88e-4, r_min_s=5.96e-8, r_min=6.10e-5, r_max=6.55e4),
        "bfloat16": dict(u=3.91e-3, r_min_s=1.18e-38, r_min=1.18e-38, r_max=3.39e38),
        "fp32": dict(u=5.96e-8, r_min_s=1.40e-45, r_min=1.18e-38, r_max=3.40e38),
        "fp64": dict(u=1.11e-16, r_min_s=4.94e-324, r_min=2.22e-308, r_max="1.80e308"),
    }
    LOG_RMAX = {"fp16": 11.0, "bfloat16": 88.7, "fp32": 88.7, "fp64": 710.0}

    @pytest.mark.parametrize("name", list(TABLE))
    def test_named_parameters(self, name):
        f = format_params(name)
        exp = self.TABLE[name]
        assert match_3sf(f.unit_roundoff, exp["u"])
        assert match_3sf(f.r_min_subnormal, exp["r_min_s"])
        assert match_3sf(f.r_min, exp["r_min"])
        assert match_3sf(f.r_max, exp["r_max"])

    @pytest.mark.parametrize("name", list(LOG_RMAX))
    def test_log_rmax(self, name):
        f = format_params(name)
        assert match_3sf(math.log(f.r_max), self.LOG_RMAX[name])

    def test_consistency_invariants(self):
        for name in self.TABLE:
            f = format_params(name)
            assert f.unit_roundoff == math.ldexp(1.0, -f.precision_bits)
            assert f.r_min == math.ldexp(1.0, f.emin)
            assert f.r_max == math.ldexp(
                2.0 - math.ldexp(1.0, 1 - f.precision_bits), f.emax
            )

    def test_bfloat16_default_has_no_subnormals(self, bf16):
        assert not bf16.subnormals_enabled
        assert bf16.r_min_subnormal == bf16.r_min

    def test_bfloat16_subnormal_variant(self):
        # same exponent/precision parameters with gradual underflow enabled
        f = format_params("custom:t=8,emin=-126,emax=127,subnormals=1")
        assert sig3(f.r_min_subnormal) == 9.18e-41
        assert sig3(math.log(f.r_min_subnormal)) == -92.2

    def test_custom_parsing(self):
        f = format_params("custom:t=11,emin=-14,emax=15,subnormals=1")
        assert f.unit_roundoff == format_params("fp16").unit_roundoff
        assert f.r_max == format_params("fp16").r_max

    @pytest.mark.parametrize(
        "bad",
        [
            "fp8",
            "custom:t=1,emin=-5,emax=5,subnormals=1",
            "custom:t=30,emin=-5,emax=5,subnormals=1",
            "custom:t=11,emin=10,emax=5,subnormals=0",
            "custom:nonsense",
        ],
    )
    def test_rejects_bad_identifiers(self, bad):
        with pytest.raises(ValueError):
            format_params(bad)


class TestRoundToFormat:
    def test_tie_to_even_at_half_ulp(self, fp16):
        assert round_to_format(1.0 + 2.0**-12, fp16) == 1.0

    def test_above_rmax_overflows(self, fp16):
        assert round_to_format(7.0e4, fp16) == math.inf
        assert round_to_format(-7.0e4, fp16) == -math.inf

    def test_flush_below_rmin_without_subnormals(self, bf16):
        assert round_to_format(1.0e-40, bf16) == 0.0
        assert round_to_format(-1.0e-40, bf16) == -0.0

    def test_subnormal_rounding_when_enabled(self, fp16):
        # quantum in the fp16 subnormal range is 2^-24
        q = 2.0**-24
        assert round_to_format(3.4 * q, fp16) == 3.0 * q
        assert round_to_format(2.5 * q, fp16) == 2.0 * q  # tie to even
        assert round_to_format(3.5 * q, fp16) == 4.0 * q

    def test_special_values(self, fp16):
        assert round_to_format(math.inf, fp16) == math.inf
        assert round_to_format(-math.inf, fp16) == -math.inf
        assert math.isnan(round_to_format(math.nan, fp16))
        assert round_to_format(0.0, fp16) == 0.0

    def test_overflow_boundary(self, fp16):
        # below the midpoint to the (nonexistent) next value stays at r_max
        assert round_to_format(65519.999, fp16) == 65504.0
        assert round_to_format(65520.0, fp16) == math.inf

    @given(st.floats(allow_nan=False, allow_infinity=False, width=16))
    def test_idempotent_on_fp16_values(self, v):
        fp16 = format_params("fp16")
        assert round_to_format(v, fp16) == v or (v == 0.0)

    @given(st.floats(allow_nan=False))
    @settings(max_examples=300)
    def test_idempotence(self, v):
        fp16 = format_params("fp16")
        r = round_to_format(v, fp16)
        assert round_to_format(r, fp16) == r or math.isnan(r)

    @given(
        st.floats(allow_nan=False, allow_infinity=False),
        st.floats(allow_nan=False, allow_infinity=False),
    )
    @settings(max_examples=300)
    def test_monotonicity(self, a, b):
        fp16 = format_params("fp16")
        lo, hi = min(a, b), max(a, b)
        assert round_to_format(lo, fp16) <= round_to_format(hi, fp16)

    def test_agrees_with_numpy_float16(self):
        import numpy as np

        fp16 = format_params("fp16")
        rng = np.random.default_rng(7)
        vals = np.concatenate(
            [
                rng.uniform(-70000, 70000, 2000),
                rng.uniform(-1e-4, 1e-4, 2000),
                rng.uniform(-2, 2, 2000),
            ]
        )
        for v in vals:
            ours = round_to_format(float(v), fp16)
            with np.errstate(over="ignore"):
                theirs = float(np.float16(v))
            assert ours == theirs or (math.isnan(ours) and math.isnan(theirs))


class TestArithmeticContext:
    def test_absorption_below_half_ulp(self, fp16):
        ctx = ArithmeticContext(fp16)
        assert ctx.add(1.0, 2.0**-12) == 1.0

    def test_multiplication_overflow(self, fp16):
        ctx = ArithmeticContext(fp16)
        assert ctx.mul(3.0e4, 4.0) == math.inf

    def test_exact_division(self, fp16):
        for ctx in (ArithmeticContext(fp16), ArithmeticContext(None)):
            assert ctx.div(1.0, 1.0) == 1.0

    def test_division_by_zero(self, fp16):
        ctx = ArithmeticContext(fp16)
        assert ctx.div(1.0, 0.0) == math.inf
        assert ctx.div(-1.0, 0.0) == -math.inf
        assert math.isnan(ctx.div(0.0, 0.0))

    def test_exp_overflow_threshold(self, fp16):
        ctx = ArithmeticContext(fp16)
        assert ctx.exp(12.0) == math.inf
        assert ctx.exp(11.0) < math.inf

    def test_unary_trivia(self, fp16):
        for ctx in (ArithmeticContext(fp16), ArithmeticContext(None)):
            assert ctx.exp(0.0) == 1.0
            assert ctx.log1p(0.0) == 0.0
            assert ctx.log(1.0) == 0.0

    def test_log_domain(self, fp16):
        ctx = ArithmeticContext(fp16)
        assert ctx.log(0.0) == -math.inf
        assert math.isnan(ctx.log(-1.0))
        assert math.isnan(ctx.log1p(-2.0))
        assert ctx.log1p(-1.0) == -math.inf

    def test_model_conformance(self, fp16):
        # |fl(a op b) - (a op b)| <= u |a op b| in the normalized range
        import numpy as np

        ctx = ArithmeticContext(fp16)
        u = fp16.unit_roundoff
        rng = np.random.default_rng(99)
        raws = rng.uniform(-100, 100, (500, 2))
        for ra, rb in raws:
            a = round_to_format(float(ra), fp16)
            b = round_to_format(float(rb), fp16)
            for op, exact in (
                (ctx.add, a + b),
                (ctx.sub, a - b),
                (ctx.mul, a * b),
            ):
                if exact == 0.0 or abs(exact) < fp16.r_min or abs(exact) > fp16.r_max:
                    continue
                assert abs(op(a, b) - exact) <= u * abs(exact)
            if b != 0.0 and fp16.r_min <= abs(a / b) <= fp16.r_max:
                assert abs(ctx.div(a, b) - a / b) <= u * abs(a / b)

    def test_fp64_simulation_matches_native(self):
        import numpy as np

        sim = ArithmeticContext(format_params("fp64"))
        nat = ArithmeticContext(None)
        rng = np.random.default_rng(3)
        for a, b in rng.uniform(-1e6, 1e6, (300, 2)):
            a, b = float(a), float(b)
            assert sim.add(a, b) == nat.add(a, b)
            assert sim.sub(a, b) == nat.sub(a, b)
            assert sim.mul(a, b) == nat.mul(a, b)
            assert sim.div(a, b) == nat.div(a, b)

    def test_unit_roundoff_property(self, fp16):
        assert ArithmeticContext(fp16).unit_roundoff == 2.0**-11
        assert ArithmeticContext(None).unit_roundoff == 2.0**-53

    def test_format_immutable(self, fp16):
        with pytest.raises(Exception):
            fp16.precision_bits = 10
