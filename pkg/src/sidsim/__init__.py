"""Physical-layer surveillance and intervention of suspicious wireless links."""

from .core import (AxisScenario, ChannelModel, InvalidInput, LinkBudget, Node, Position, Role,
                   capacity, db_to_linear, dbm_to_watts, link_snr, linear_to_db, pathloss_gain,
                   sinr)
from .surveillance import (Mode, Sign, SidControl, SurveillanceOutcome, eavesdropping_rate,
                           passive_eavesdrop, proactive_auto, proactive_noise_jam, proactive_relay)

__version__ = "0.1.0"
