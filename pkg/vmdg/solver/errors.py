class VmdgError(Exception):
    """Base class for every error raised by the solver and the harness."""


class MeshError(VmdgError, ValueError):
    pass


class MeshMismatchError(VmdgError, ValueError):
    pass


class BasisError(VmdgError, ValueError):
    pass


class MaxwellConfigError(VmdgError, ValueError):
    pass


class NonFiniteStateError(VmdgError, ArithmeticError):
    pass


class BlowUpError(VmdgError, RuntimeError):
    def __init__(self, step: int, time: float, message: str = ""):
        self.step = step
        self.time = time
        super().__init__(message or f"Non-finite norm detected at step {step} (t={time:.6g})")


class UnknownScenarioError(VmdgError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"Unknown scenario: {self.name!r}"


class ConfigError(VmdgError, ValueError):
    def __init__(self, message: str, key: str = None):
        self.key = key
        super().__init__(message)


class ScenarioCheckError(VmdgError, RuntimeError):
    pass
