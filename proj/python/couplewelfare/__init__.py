"""Python access to the couplewelfare core."""

try:
    from ._couplewelfare import (
        CoupleWelfareError,
        TaxSchedule,
        flat_schedule,
        hsv_mdwl,
        linearization_bias,
        load_schedule,
        marginal_excess_burden,
        marginal_rate,
        participation_rate,
        run,
        total_tax,
    )
except ImportError:  # in-tree build, extension on PYTHONPATH
    from _couplewelfare import (
        CoupleWelfareError,
        TaxSchedule,
        flat_schedule,
        hsv_mdwl,
        linearization_bias,
        load_schedule,
        marginal_excess_burden,
        marginal_rate,
        participation_rate,
        run,
        total_tax,
    )

__all__ = [
    "CoupleWelfareError",
    "TaxSchedule",
    "flat_schedule",
    "hsv_mdwl",
    "linearization_bias",
    "load_schedule",
    "marginal_excess_burden",
    "marginal_rate",
    "participation_rate",
    "run",
    "total_tax",
]
