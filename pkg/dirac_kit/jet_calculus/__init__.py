"""Charts, jet-valued fields and the calculus on them"""

from .calculus import (annihilator_frame, d_two_form_components, d_two_form_contract,
                       exterior_derivative_one_form, frame_steps, interior_product,
                       kernel_frame, lie_bracket, lie_derivative_one_form, normalized_frame,
                       pullback, push_forward)
from .charts import Chart, default_interval, sample_points
from .fields import (Bivector, ChartMap, OneForm, ScalarField, TwoForm, VectorField,
                     require_same_chart)
from .jets import Jet2, compose, jcos, jet_solve, jsin, jsqrt, stencil_jets

__all__ = [
    "Chart", "default_interval", "sample_points",
    "Jet2", "compose", "jcos", "jsin", "jsqrt", "jet_solve", "stencil_jets",
    "ScalarField", "VectorField", "OneForm", "TwoForm", "Bivector", "ChartMap",
    "require_same_chart",
    "lie_bracket", "exterior_derivative_one_form", "d_two_form_components",
    "d_two_form_contract", "lie_derivative_one_form", "interior_product", "pullback",
    "push_forward", "kernel_frame", "annihilator_frame", "normalized_frame", "frame_steps",
]
