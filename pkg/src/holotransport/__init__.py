"""Parallel transport of computational subspaces, holonomic gates and speed limits."""

from .dynamics import (
    ConstantHamiltonian,
    GeneratorFrame,
    RotatedHamiltonian,
    SampledFrame,
    SampledHamiltonian,
    ShiftFunction,
    from_rotating_frame,
    frame_potential,
    propagate,
    to_rotating_frame,
)
from .errors import (
    CodimensionError,
    DegeneracyError,
    GridError,
    OpenLoopError,
    StructuralError,
    TangencyError,
    VerificationError,
)
from .frames import ProjectorPath, gauge_act, orthonormalize, projector_of, projectively_equal
from .matrixcore import DEFAULT_TOL, Tolerance, eig_hermitian, eig_unitary, expm_skew
from .metrics import (
    GateSpec,
    ProjectiveGate,
    QslReport,
    curve_length,
    holonomy,
    isoholonomic_bound,
    projective_distance,
    projective_holonomy,
    projective_isoholonomic_bound,
    qsl_report,
    skew_information,
)
from .protocols import TightProtocol, block_trajectory, build_tight, verify_tight
from .transport import (
    FramePath,
    TransportReport,
    check_parallel_lab,
    check_parallel_rotating,
    check_projective_lab,
    check_projective_rotating,
    connection_eval,
    gauge_shift,
    horizontal_lift,
    loop_closure,
    projective_horizontal_lift,
)

__version__ = "0.1.0"
