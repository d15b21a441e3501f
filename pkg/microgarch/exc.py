from typing import Optional

from microgarch.context import RunContext


class BaseException(Exception):
    """This is a convenience base class for all microgarch exceptions, to make them
    easier to catch.

    :param ctx: The context of the run that failed.
    :cvar exit_code: The process exit code used by the command-line front end.

    :meta private:
    """

    exit_code = 1

    def __init__(self, msg: str, *, ctx: Optional[RunContext] = None):
        self.ctx = ctx if ctx is not None else RunContext()
        super().__init__(msg)


class InvalidParameter(BaseException):
    """
    Thrown when a model parameter violates its range invariant, for example a
    non-positive risk aversion or a negative trader ratio.

    :param name: The name of the offending parameter.
    :param value: The rejected value.
    :param reason: The violated requirement, e.g. ``"must be > 0"``.
    :param ctx: The context of the run.
    """

    exit_code = 3

    def __init__(self, *, name: str, value: object, reason: str, ctx=None):
        super().__init__(f"Parameter `{name}`={value!r} {reason}", ctx=ctx)
        self.name = name
        self.value = value
        self.reason = reason


class NonStationaryParams(BaseException):
    """
    Thrown when the parameters map to a GARCH(1,1) process with ``alpha + beta >= 1``.
    For micro parameters this is ``rho^2 k^2 (p1^2 lambda^2 + p2^2 gamma^2) >= 1``.

    :param alpha: The shock sensitivity.
    :param beta: The volatility persistence.
    :param ctx: The context of the run.
    :ivar margin: ``1 - (alpha + beta)``, never positive here.
    """

    exit_code = 3

    def __init__(self, *, alpha: float, beta: float, ctx=None):
        self.alpha = alpha
        self.beta = beta
        self.margin = 1.0 - (alpha + beta)
        super().__init__(
            f"Not stationary: alpha + beta = {alpha!r} + {beta!r} = {alpha + beta!r}"
            " violates alpha + beta < 1",
            ctx=ctx,
        )


class ReductionMismatch(BaseException):
    """
    Thrown when a market-type reduction is requested for parameters whose trader
    ratios do not describe that market, e.g. the noise-only reduction with ``p1 > 0``.

    :param reduction: The name of the requested reduction.
    :param ratios: The offending ratios, by name.
    :param ctx: The context of the run.
    """

    exit_code = 3

    def __init__(self, *, reduction: str, ratios: dict[str, float], ctx=None):
        nice = ", ".join(f"{k}={v!r}" for k, v in ratios.items())
        super().__init__(
            f"Reduction `{reduction}` requires zero ratios ({nice})", ctx=ctx
        )
        self.reduction = reduction
        self.ratios = ratios


class UnknownFunction(BaseException):
    """
    Thrown when a function tag does not name anything in a catalog.

    :param tag: The tag that was requested.
    :param kind: Which catalog was searched, e.g. ``"g"``, ``"h"`` or ``"utility"``.
    :param known: The tags that are available.
    :param ctx: The context of the run.
    """

    exit_code = 2

    def __init__(self, *, tag: str, kind: str, known: list[str], ctx=None):
        super().__init__(
            f"Unknown {kind} function `{tag}` (known: {', '.join(sorted(known))})",
            ctx=ctx,
        )
        self.tag = tag
        self.kind = kind
        self.known = known


class NotConcave(BaseException):
    """
    Thrown when a utility handed to the risk-monotonicity check is not strictly
    increasing and strictly concave.

    :param utility: The utility tag.
    :param ctx: The context of the run.
    """

    exit_code = 3

    def __init__(self, *, utility: str, ctx=None):
        super().__init__(
            f"Utility `{utility}` is not strictly increasing and strictly concave",
            ctx=ctx,
        )
        self.utility = utility


class UtilityDomainError(BaseException):
    """
    Thrown when evaluating an expected utility needs the utility outside of its
    domain, like a logarithm of a non-positive wealth.

    :param utility: The utility tag.
    :param mu: The mean of the return distribution.
    :param sigma: The standard deviation that left the domain.
    :param ctx: The context of the run.
    """

    exit_code = 5

    def __init__(self, *, utility: str, mu: float, sigma: float, ctx=None):
        super().__init__(
            f"Utility `{utility}` is undefined for returns around mu={mu!r} with "
            f"sigma={sigma!r}",
            ctx=ctx,
        )
        self.utility = utility
        self.mu = mu
        self.sigma = sigma


class DegenerateSample(BaseException):
    """
    Thrown when a statistic cannot be computed on a sample, typically because the
    series is constant.

    :param statistic: The statistic being computed.
    :param reason: Why the sample is degenerate.
    :param ctx: The context of the run.
    """

    exit_code = 5

    def __init__(self, *, statistic: str, reason: str, ctx=None):
        super().__init__(f"Cannot compute {statistic}: {reason}", ctx=ctx)
        self.statistic = statistic
        self.reason = reason


class InsufficientSample(BaseException):
    """
    Thrown when a sample is shorter than an operation requires.

    :param required: The minimum number of observations.
    :param actual: The number of observations given.
    :param ctx: The context of the run.
    """

    exit_code = 5

    def __init__(self, *, required: int, actual: int, ctx=None):
        super().__init__(
            f"Need at least {required} observations, got {actual}", ctx=ctx
        )
        self.required = required
        self.actual = actual


class DuplicateSeeds(BaseException):
    """
    Thrown when a batch is given the same seed more than once.

    :param seeds: The repeated seeds.
    :param ctx: The context of the run.
    """

    exit_code = 2

    def __init__(self, *, seeds: list[int], ctx=None):
        super().__init__(f"Duplicate seeds in batch: {seeds!r}", ctx=ctx)
        self.seeds = seeds


class ConfigError(BaseException):
    """
    Thrown when a configuration file is missing, unparsable, or has keys that are not
    part of the schema.

    :param reason: What went wrong.
    :param key: The offending key, dotted, if there is one.
    :param ctx: The context of the run.
    """

    exit_code = 2

    def __init__(self, *, reason: str, key: Optional[str] = None, ctx=None):
        message = f"Invalid configuration: {reason}"
        if key is not None:
            message += f" (key `{key}`)"
        super().__init__(message, ctx=ctx)
        self.reason = reason
        self.key = key


class GridSyntaxError(BaseException):
    """
    Thrown when a value grid like ``0:0.6:0.2`` or ``linspace(0.1, 1, 10)`` cannot be
    parsed.

    :param spec: The grid text.
    :param ctx: The context of the run.
    """

    exit_code = 2

    def __init__(self, *, spec: str, reason: str = "not a valid grid", ctx=None):
        super().__init__(f"Grid `{spec}` is {reason}", ctx=ctx)
        self.spec = spec


class MalformedCSV(BaseException):
    """
    Thrown when a return series CSV cannot be read. The row number refers to the data
    row, starting at 1, and is also stored on the context.

    :param reason: What is wrong with the file.
    :param row: The offending data row, if there is one.
    :param ctx: The context of the run.
    """

    exit_code = 5

    def __init__(self, *, reason: str, row: Optional[int] = None, ctx=None):
        message = f"Malformed CSV: {reason}"
        if row is not None:
            message = f"Malformed CSV at row {row}: {reason}"
        super().__init__(message, ctx=ctx)
        self.reason = reason
        self.row = row


class OutputError(BaseException):
    """
    Thrown when an output file cannot be written.

    :param path: The path that could not be written.
    :param ctx: The context of the run.
    """

    exit_code = 4

    def __init__(self, *, path: str, ctx=None):
        super().__init__(f"Cannot write output `{path}`", ctx=ctx)
        self.path = path


class DivergedSimulation(BaseException):
    """
    Thrown when the market recursion produces a non-finite return or volatility.

    :param step: The step, counting burn-in, at which the value stopped being finite.
    :param ctx: The context of the run.
    """

    exit_code = 5

    def __init__(self, *, step: int, ctx=None):
        super().__init__(f"Simulation diverged at step {step}", ctx=ctx)
        self.step = step
