"""Communication utility of quantum channels for communication games."""

from .channels import Channel, apply, adjoint_apply, choi, validate_cptp
from .closedform import HelstromResult, UtilityResult, closed_form, helstrom
from .games import Game, reduce_binary_output, upper_bound
from .matcore import ValidationError
from .oracle import OracleConfig, qubit_binary_grid, seesaw

__version__ = "0.1.0"
