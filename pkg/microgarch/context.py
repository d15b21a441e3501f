from typing import Any


class RunContext:
    """Captures the context of a simulation or analysis run. For example, this will
    store the seed, the step being computed, and the input file being read, at
    different stages. This is used for logging and exceptions."""

    def __init__(self, **fields: Any) -> None:
        # the seed of the random generator driving the run
        self.seed: int | None = None
        # the step index being computed when the error happened
        self.step: int | None = None
        # a plain-dict snapshot of the parameters in use
        self.params: dict[str, Any] | None = None
        # the file being read, for CSV / config errors
        self.path: str | None = None
        # the 1-based data row being parsed
        self.row: int | None = None

        for name, value in fields.items():
            if not hasattr(self, name):
                raise AttributeError(f"RunContext has no field {name!r}")
            setattr(self, name, value)

    def as_dict(self) -> dict[str, Any]:
        return {k: v for k, v in vars(self).items() if v is not None}

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.as_dict().items())
        return f"RunContext({inner})"
