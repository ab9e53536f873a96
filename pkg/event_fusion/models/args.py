# models/args.py
from pydantic import BaseModel, ConfigDict
from event_fusion.models.mixins import (
    FilterMixin,
    SimulationMixin,
    GainRangeMixin,
    ReconstructMixin,
    SimulateMixin,
    CalibrateMixin,
    EvaluateMixin,
    )

class Base(BaseModel):
    # config files carry keys for several commands; each model takes its own
    model_config = ConfigDict(extra="ignore", populate_by_name=True)

class FilterConfig(Base, FilterMixin):
    pass

class SimulationConfig(Base, SimulationMixin):
    pass

class ReconstructArgs(Base, ReconstructMixin, FilterMixin):
    pass

class SimulateArgs(Base, SimulateMixin, SimulationMixin):
    pass

class CalibrateArgs(Base, CalibrateMixin, GainRangeMixin):
    pass

class EvaluateArgs(Base, EvaluateMixin):
    pass
