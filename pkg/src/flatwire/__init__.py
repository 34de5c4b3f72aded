"""flatwire: analysis of flat-wire helical inductors on gapped cores.

Library layout:

design / configio / presets   parametric inductor description, config I/O
dcr                           DC resistance closed forms + quadrature oracle
mec                           reluctance network and terminal impedance
mesh / field                  axisymmetric eddy-current solver
post                          AC resistance, inductance, eddy factor, losses
ripple                        converter triangle-ripple harmonic losses
sweep / cli                   sensitivity sweeps and the command line
"""

__version__ = "0.1.0"

from .configio import dump_design, load_design, load_design_file, schema_text
from .design import (
    Clearances,
    CoilSpec,
    CoreSpec,
    DerivedDims,
    FringingModel,
    GapSpec,
    InductorDesign,
    derived_dims,
    require_valid,
    validate,
)
from .errors import (
    ConfigError,
    ExtrapolationError,
    FlatwireError,
    GeometryError,
    NumericalError,
    TopologyError,
    ValidationError,
)

__all__ = [
    "__version__",
    "Clearances", "CoilSpec", "CoreSpec", "DerivedDims", "FringingModel",
    "GapSpec", "InductorDesign", "derived_dims", "require_valid", "validate",
    "dump_design", "load_design", "load_design_file", "schema_text",
    "ConfigError", "ExtrapolationError", "FlatwireError", "GeometryError",
    "NumericalError", "TopologyError", "ValidationError",
]
