"""Exception hierarchy. Every error carries the name of the module that raised it."""


class ZenoLabError(Exception):
    module = "zeno-lab"

    def __str__(self):
        return f"{self.module}: {super().__str__()}"


class LinalgError(ZenoLabError, ValueError):
    module = "linalg-core"


class ModelError(ZenoLabError, ValueError):
    module = "model"


class AnalyticError(ZenoLabError, ValueError):
    module = "analytic-uncorrelated"


class SimulationError(ZenoLabError, ValueError):
    module = "trajectory-sim"


class QfiError(ZenoLabError, ArithmeticError):
    module = "qfi-qsl"


class SweepError(ZenoLabError, RuntimeError):
    module = "sweep-optimize"


class ConfigError(ZenoLabError, ValueError):
    module = "cli-io"
