"""Nonadiabatic geometric quantum gates.

Prescribed closed paths on the Bloch sphere are turned into driving
Hamiltonians, propagated, and checked for cyclicity and parallel
transport. Candidate paths for a target gate can be planned and
compared, and the two-qubit exchange drive can be validated against a
trapped-ion sideband model.
"""

from geogates.version import __version__  # noqa: F401
from geogates.qcore import (GateSpec,  # noqa: F401
                            HermitianMatrix,
                            StateVector,
                            UnitaryMatrix,
                            gate_fidelity,
                            gate_from_spec,
                            holonomy_extract)
from geogates.paths import (ParamCurve,  # noqa: F401
                            min_circle_curve,
                            path_length,
                            sample,
                            solid_angle_phase)
