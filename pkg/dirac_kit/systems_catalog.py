"""
Built-in systems with their actions and expected results.

Each entry is a document in the system_config format, so `dirac-kit custom` can run any
of them after a json dump. Physical parameters default to 1.
"""

import copy
from typing import Any, Dict, List, Mapping, Optional

from .errors import InputError
from .system_config import SystemSetup, build_system

# checks that need a genuine cotangent lift
POSITIONAL_FAILURES = ["dirac_invariance", "momentum_identity", "noether_pair_in_D", "noether_residuals",
                       "k_perp_brackets"]

CONSTRAINED_PARTICLE: Dict[str, Any] = {
    "name": "constrained_particle",
    "description": "Unit-mass particle in R^3 with dz = y dx",
    "chart": ["x", "y", "z"],
    "params": {},
    "metric": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
    "potential": "0",
    "constraints": [["-y", "0", "1"]],
    "eliminate": ["p_z"],
    "expected": {
        "eliminated": {"p_z": "y*p_x"},
        "omega_M": [["x", "p_x", "1"], ["y", "p_y", "1"], ["z", "y", "p_x"], ["z", "p_x", "y"]],
        "horizontal": [{"x": "1", "z": "y"}, {"y": "1"}, {"p_x": "1"}, {"p_y": "1"}],
        "dirac_sections": [
            {"vector": {"x": "1", "z": "y"}, "form": {"p_x": "1+y^2", "y": "y*p_x"}},
            {"vector": {"y": "1"}, "form": {"p_y": "1", "z": "-p_x"}},
            {"vector": {"p_y": "1"}, "form": {"y": "-1"}},
            {"vector": {"p_x": "1"}, "form": {"z": "-y", "x": "-1"}},
            {"vector": {}, "form": {"z": "1", "x": "-y"}},
        ],
        "hamiltonian": "((1+y^2)*p_x^2+p_y^2)/2",
    },
    "actions": [{
        "name": "R2",
        "description": "translations in x and z",
        "generators": [["1", "0", "0"], ["0", "0", "1"]],
        "structure_constants": [],
        "lift": True,
        "quotient": {"coords": ["y", "p_x", "p_y"], "projection": ["y", "p_x", "p_y"],
                     "slice": ["0", "y", "0", "p_x", "p_y"]},
        "expected": {
            "d_red": [
                {"vector": {"p_y": "1"}, "form": {"y": "-1"}},
                {"vector": {}, "form": {"p_x": "1+y^2", "y": "y*p_x"}},
                {"vector": {"y": "1+y^2", "p_x": "-y*p_x"}, "form": {"p_y": "1+y^2"}},
            ],
            "d_red_bivector": [["y", "p_y", "-1"], ["p_x", "p_y", "y*p_x/(1+y^2)"]],
            "d_red_closed": True,
            "poisson_brackets": [
                {"f": "y", "g": "p_y", "value": "1"},
                {"f": "y", "g": "p_x", "value": "0"},
                {"f": "p_y", "g": "p_x", "value": "y*p_x/(1+y^2)"},
            ],
            "omega_hbar": [{"u": {"p_y": "1"}, "v": {"y": "1+y^2", "p_x": "-y*p_x"}, "value": "-(1+y^2)"}],
            "momentum_components": [{"coefficients": [1, 0], "value": "p_x"},
                                    {"coefficients": [0, 1], "value": "y*p_x"}],
            "noether_sections": [{"coefficients": ["1", "y"], "form": {"p_x": "1+y^2", "y": "y*p_x"}}],
            "horizontal_annihilator": [{"y": "1+y^2", "p_x": "-y*p_x"}, {"x": "1", "z": "y"}, {"p_y": "1"}],
            "reaction": [{"z": "1", "x": "-y"}],
            "optimal_distribution": [{"p_y": "1"}, {"x": "1"}, {"z": "1"}, {"p_x": "y*p_x", "y": "-(1+y^2)"}],
            "dg_involutive": True,
            "conserved_functions": ["sqrt(1+y^2)*p_x"],
            "conserved_criteria": [{"coefficients": [1, 0], "expected": False},
                                   {"coefficients": [0, 1], "expected": False}],
        },
        "leaf": {
            "chart": ["x", "y", "z", "p_y"],
            "params": {"mu": 1.0},
            "embedding": ["x", "y", "z", "mu/sqrt(1+y^2)", "p_y"],
            "conserved": ["sqrt(1+y^2)*p_x"],
            "values": ["mu"],
            "generators": [["1", "0", "0", "0"], ["0", "0", "1", "0"]],
            "quotient": {"coords": ["y", "p_y"], "projection": ["y", "p_y"], "slice": ["0", "y", "0", "p_y"]},
            "expected": {"d_rho": [{"vector": {"p_y": "1"}, "form": {"y": "-1"}},
                                   {"vector": {"y": "1+y^2"}, "form": {"p_y": "1+y^2"}}]},
        },
        "expected_failures": [],
    }],
}

# disk: k = μR/I, c = 1 + μR²/I
_K = "mu*R/I"
_C = "1+mu*R^2/I"
_ROLL = {"theta": "1", "x": "R*cos(phi)", "y": "R*sin(phi)"}
_I_DPHI = {"p_phi": "1", "x": f"{_K}*p_theta*sin(phi)", "y": f"-{_K}*p_theta*cos(phi)"}
_DISK_ROT = ["-y", "x", "0", "1"]
_DISK_REACTION_PHI = [{"x": f"{_K}*p_theta*sin(phi)", "y": f"-{_K}*p_theta*cos(phi)"}]
_DISK_H_ANNIHILATOR = [{"x": "1", "theta": "-R*cos(phi)"}, {"y": "1", "theta": "-R*sin(phi)"}]

VERTICAL_DISK: Dict[str, Any] = {
    "name": "vertical_disk",
    "description": "Disk rolling upright without slipping on the plane",
    "chart": ["x", "y", "theta", "phi"],
    "params": {"mu": 1.0, "I": 1.0, "J": 1.0, "R": 1.0},
    "metric": [["mu", "0", "0", "0"], ["0", "mu", "0", "0"], ["0", "0", "I", "0"], ["0", "0", "0", "J"]],
    "potential": "0",
    "constraints": [["1", "0", "-R*cos(phi)", "0"], ["0", "1", "-R*sin(phi)", "0"]],
    "eliminate": ["p_x", "p_y"],
    "expected": {
        "eliminated": {"p_x": f"{_K}*p_theta*cos(phi)", "p_y": f"{_K}*p_theta*sin(phi)"},
        "omega_M": [["x", "p_theta", f"{_K}*cos(phi)"], ["x", "phi", f"-{_K}*p_theta*sin(phi)"],
                    ["y", "p_theta", f"{_K}*sin(phi)"], ["y", "phi", f"{_K}*p_theta*cos(phi)"],
                    ["theta", "p_theta", "1"], ["phi", "p_phi", "1"]],
        "horizontal": [{"phi": "1"}, _ROLL, {"p_theta": "1"}, {"p_phi": "1"}],
        "dirac_sections": [
            {"vector": {"phi": "1"}, "form": _I_DPHI},
            {"vector": _ROLL, "form": {"p_theta": _C}},
            {"vector": {"p_theta": "1"}, "form": {"theta": "-1", "x": f"-{_K}*cos(phi)", "y": f"-{_K}*sin(phi)"}},
            {"vector": {"p_phi": "1"}, "form": {"phi": "-1"}},
            {"vector": {}, "form": {"x": "1", "theta": "-R*cos(phi)"}},
            {"vector": {}, "form": {"y": "1", "theta": "-R*sin(phi)"}},
        ],
        "hamiltonian": "((mu*R^2+I)*p_theta^2/I^2+p_phi^2/J)/2",
    },
    "actions": [
        {
            "name": "R2",
            "description": "translations of the contact point",
            "generators": [["1", "0", "0", "0"], ["0", "1", "0", "0"]],
            "lift": True,
            "quotient": {"coords": ["theta", "phi", "p_theta", "p_phi"],
                         "projection": ["theta", "phi", "p_theta", "p_phi"],
                         "slice": ["0", "0", "theta", "phi", "p_theta", "p_phi"]},
            "expected": {
                "d_red_two_form": [["phi", "p_phi", "1"], ["theta", "p_theta", _C]],
                "d_red_closed": True,
                "omega_hbar": [{"u": {"phi": "1"}, "v": {"p_phi": "1"}, "value": "1"},
                               {"u": {"theta": "1"}, "v": {"p_theta": "1"}, "value": _C}],
                "momentum_components": [{"coefficients": [1, 0], "value": f"{_K}*p_theta*cos(phi)"},
                                        {"coefficients": [0, 1], "value": f"{_K}*p_theta*sin(phi)"}],
                "horizontal_annihilator": [{"phi": "1"}, _ROLL, {"p_theta": "1"}, {"p_phi": "1"}],
                "reaction": _DISK_H_ANNIHILATOR,
                "optimal_distribution": [{"x": "1"}, {"y": "1"}, {"theta": "1"}, {"phi": "1"},
                                         {"p_theta": "1"}, {"p_phi": "1"}],
                "dg_involutive": True,
                "conserved_criteria": [{"coefficients": [1, 0], "expected": False},
                                       {"coefficients": [0, 1], "expected": False}],
            },
            "expected_failures": [],
        },
        {
            "name": "SE2",
            "description": "rigid motions of the plane, turning the disk with them",
            "generators": [_DISK_ROT, ["1", "0", "0", "0"], ["0", "1", "0", "0"]],
            "structure_constants": [[1, 2, 3, 1.0], [1, 3, 2, -1.0]],
            "lift": True,
            "quotient": {"coords": ["theta", "p_theta", "p_phi"], "projection": ["theta", "p_theta", "p_phi"],
                         "slice": ["0", "0", "theta", "0", "p_theta", "p_phi"]},
            "expected": {
                "d_red": [{"vector": {}, "form": {"p_phi": "1"}},
                          {"vector": {"p_theta": "1"}, "form": {"theta": f"-({_C})"}},
                          {"vector": {"theta": "1"}, "form": {"p_theta": _C}}],
                "d_red_bivector": [["p_theta", "theta", "I/(mu*R^2+I)"]],
                "d_red_closed": True,
                "poisson_brackets": [{"f": "theta", "g": "p_theta", "value": "I/(mu*R^2+I)"}],
                "omega_hbar": [{"u": {"theta": "1"}, "v": {"p_theta": "1"}, "value": _C}],
                "momentum_components": [
                    {"coefficients": [1, 0, 0],
                     "value": f"p_phi-y*{_K}*p_theta*cos(phi)+x*{_K}*p_theta*sin(phi)"},
                    {"coefficients": [0, 1, 0], "value": f"{_K}*p_theta*cos(phi)"},
                    {"coefficients": [0, 0, 1], "value": f"{_K}*p_theta*sin(phi)"},
                ],
                "noether_sections": [{"coefficients": ["1", "y", "-x"], "form": _I_DPHI}],
                "horizontal_annihilator": [{"phi": "1"}, _ROLL, {"p_theta": "1"}],
                "reaction": _DISK_H_ANNIHILATOR,
                "optimal_distribution": [{"x": "1"}, {"y": "1"}, {"theta": "1"}, {"phi": "1"}, {"p_theta": "1"}],
                "dg_involutive": True,
                "conserved_functions": ["p_phi"],
                "conserved_criteria": [{"coefficients": [1, 0, 0], "expected": False},
                                       {"coefficients": [0, 1, 0], "expected": False},
                                       {"coefficients": [0, 0, 1], "expected": False}],
            },
            "leaf": {
                "chart": ["x", "y", "theta", "phi", "p_theta"],
                "params": {"rho": 1.0},
                "embedding": ["x", "y", "theta", "phi", "p_theta", "rho"],
                "conserved": ["p_phi"],
                "values": ["rho"],
                "generators": [["-y", "x", "0", "1", "0"], ["1", "0", "0", "0", "0"], ["0", "1", "0", "0", "0"]],
                "structure_constants": [[1, 2, 3, 1.0], [1, 3, 2, -1.0]],
                "quotient": {"coords": ["theta", "p_theta"], "projection": ["theta", "p_theta"],
                             "slice": ["0", "0", "theta", "0", "p_theta"]},
                "expected": {"d_rho": [{"vector": {"theta": "1"}, "form": {"p_theta": _C}},
                                       {"vector": {"p_theta": "1"}, "form": {"theta": f"-({_C})"}}]},
            },
            "expected_failures": [],
        },
        {
            "name": "S1xR2",
            "description": "rolling angle and translations",
            "generators": [["0", "0", "1", "0"], ["1", "0", "0", "0"], ["0", "1", "0", "0"]],
            "lift": True,
            "quotient": {"coords": ["phi", "p_phi", "p_theta"], "projection": ["phi", "p_phi", "p_theta"],
                         "slice": ["0", "0", "0", "phi", "p_theta", "p_phi"]},
            "expected": {
                "d_red": [{"vector": {"phi": "1"}, "form": {"p_phi": "1"}},
                          {"vector": {"p_phi": "1"}, "form": {"phi": "-1"}},
                          {"vector": {}, "form": {"p_theta": "1"}}],
                "d_red_bivector": [["p_phi", "phi", "1"]],
                "d_red_closed": True,
                "poisson_brackets": [{"f": "phi", "g": "p_phi", "value": "1"}],
                "omega_hbar": [{"u": {"phi": "1"}, "v": {"p_phi": "1"}, "value": "1"}],
                "momentum_components": [{"coefficients": [1, 0, 0], "value": "p_theta"},
                                        {"coefficients": [0, 1, 0], "value": f"{_K}*p_theta*cos(phi)"},
                                        {"coefficients": [0, 0, 1], "value": f"{_K}*p_theta*sin(phi)"}],
                "noether_sections": [{"coefficients": ["1", "R*cos(phi)", "R*sin(phi)"], "form": {"p_theta": _C}}],
                "horizontal_annihilator": [{"phi": "1"}, _ROLL, {"p_phi": "1"}],
                "reaction": _DISK_REACTION_PHI,
                "optimal_distribution": [{"x": "1"}, {"y": "1"}, {"theta": "1"}, {"phi": "1"}, {"p_phi": "1"}],
                "dg_involutive": True,
                "conserved_functions": ["p_theta"],
                "conserved_criteria": [{"coefficients": [1, 0, 0], "expected": True},
                                       {"coefficients": [0, 1, 0], "expected": False},
                                       {"coefficients": [0, 0, 1], "expected": False}],
            },
            "leaf": {
                "chart": ["x", "y", "theta", "phi", "p_phi"],
                "params": {"rho": 1.0},
                "embedding": ["x", "y", "theta", "phi", "rho", "p_phi"],
                "conserved": ["p_theta"],
                "values": ["rho"],
                "generators": [["0", "0", "1", "0", "0"], ["1", "0", "0", "0", "0"], ["0", "1", "0", "0", "0"]],
                "quotient": {"coords": ["phi", "p_phi"], "projection": ["phi", "p_phi"],
                             "slice": ["0", "0", "0", "phi", "p_phi"]},
                "expected": {"d_rho": [{"vector": {"phi": "1"}, "form": {"p_phi": "1"}},
                                       {"vector": {"p_phi": "1"}, "form": {"phi": "-1"}}]},
            },
            "expected_failures": [],
        },
        {
            "name": "SE2xS1",
            "description": "rigid motions together with the rolling angle",
            "generators": [_DISK_ROT, ["1", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "1", "0"]],
            "structure_constants": [[1, 2, 3, 1.0], [1, 3, 2, -1.0]],
            "lift": True,
            "quotient": {"coords": ["p_theta", "p_phi"], "projection": ["p_theta", "p_phi"],
                         "slice": ["0", "0", "0", "0", "p_theta", "p_phi"]},
            "expected": {
                "d_red": [{"vector": {}, "form": {"p_theta": "1"}}, {"vector": {}, "form": {"p_phi": "1"}}],
                "d_red_closed": True,
                "noether_sections": [{"coefficients": ["1", "y", "-x", "0"], "form": _I_DPHI},
                                     {"coefficients": ["0", "R*cos(phi)", "R*sin(phi)", "1"],
                                      "form": {"p_theta": _C}}],
                "horizontal_annihilator": [{"phi": "1"}, _ROLL],
                "reaction": _DISK_REACTION_PHI,
                "optimal_distribution": [{"x": "1"}, {"y": "1"}, {"theta": "1"}, {"phi": "1"}],
                "dg_involutive": True,
                "conserved_functions": ["p_theta", "p_phi"],
                "conserved_criteria": [{"coefficients": [1, 0, 0, 0], "expected": False},
                                       {"coefficients": [0, 1, 0, 0], "expected": False},
                                       {"coefficients": [0, 0, 1, 0], "expected": False},
                                       {"coefficients": [0, 0, 0, 1], "expected": True}],
            },
            "expected_failures": [],
        },
    ],
}

# skate frame
_FORWARD = {"x": "cos(theta)", "y": "sin(theta)"}
_KNIFE = {"x": "sin(theta)", "y": "-cos(theta)"}
_SKATE_LEAF_SECTIONS = [{"vector": _FORWARD, "form": {}}, {"vector": {"theta": "1"}, "form": {}}]
_SKATE_A = ["-sin(theta)/s", "cos(theta)^2-y*sin(theta)/s", "sin(theta)*(cos(theta)+x/s)"]
_SKATE_B = ["cos(theta)/s", "cos(theta)*(sin(theta)+y/s)", "sin(theta)^2-x*cos(theta)/s"]

CHAPLYGIN_SKATE: Dict[str, Any] = {
    "name": "chaplygin_skate",
    "description": "Knife edge on the plane with its mass centre a distance s behind the blade",
    "chart": ["theta", "x", "y"],
    "params": {"m": 1.0, "s": 1.0},
    "metric": [["m*s^2", "-m*s*sin(theta)", "m*s*cos(theta)"],
               ["-m*s*sin(theta)", "m", "0"],
               ["m*s*cos(theta)", "0", "m"]],
    "potential": "0",
    "constraints": [["0", "sin(theta)", "-cos(theta)"]],
    "eliminate": ["p_theta"],
    "expected": {
        "eliminated": {"p_theta": "s*p_y*cos(theta)-s*p_x*sin(theta)"},
        "omega_M": [["theta", "p_y", "s*cos(theta)"], ["theta", "p_x", "-s*sin(theta)"],
                    ["x", "p_x", "1"], ["y", "p_y", "1"]],
        "horizontal": [_FORWARD, {"theta": "1"}, {"p_x": "1"}, {"p_y": "1"}],
        "dirac_sections": [
            {"vector": {"theta": "1"}, "form": {"p_y": "s*cos(theta)", "p_x": "-s*sin(theta)"}},
            {"vector": _FORWARD, "form": {"p_x": "cos(theta)", "p_y": "sin(theta)"}},
            {"vector": {"p_x": "1"}, "form": {"x": "-1", "theta": "s*sin(theta)"}},
            {"vector": {"p_y": "1"}, "form": {"y": "-1", "theta": "-s*cos(theta)"}},
            {"vector": {}, "form": _KNIFE},
        ],
        "hamiltonian": "(p_x^2+p_y^2)/(2*m)",
    },
    "actions": [
        {
            "name": "SE2",
            "description": "rigid motions of the plane, written positionally",
            "generators": [["1", "-y", "x"], ["0", "1", "0"], ["0", "0", "1"]],
            "structure_constants": [[1, 2, 3, 1.0], [1, 3, 2, -1.0]],
            "lift": False,
            "quotient": {"coords": ["p_x", "p_y"], "projection": ["p_x", "p_y"],
                         "slice": ["0", "0", "0", "p_x", "p_y"]},
            "expected": {
                "d_red": [{"vector": {}, "form": {"p_x": "1"}}, {"vector": {}, "form": {"p_y": "1"}}],
                "d_red_closed": True,
                "noether_sections": [
                    {"coefficients": ["1", "y", "-x"], "form": {"p_y": "s*cos(theta)", "p_x": "-s*sin(theta)"}},
                    {"coefficients": ["0", "cos(theta)", "sin(theta)"],
                     "form": {"p_x": "cos(theta)", "p_y": "sin(theta)"}},
                    {"coefficients": _SKATE_A, "form": {"p_x": "1"}},
                    {"coefficients": _SKATE_B, "form": {"p_y": "1"}},
                ],
                "horizontal_annihilator": [{"theta": "1"}, _FORWARD],
                "reaction": [],
                "optimal_distribution": [{"theta": "1"}, {"x": "1"}, {"y": "1"}],
                "dg_involutive": True,
                "conserved_functions": ["p_x", "p_y"],
                "conserved_criteria": [{"coefficients": [1, 0, 0], "expected": True},
                                       {"coefficients": [0, 1, 0], "expected": True},
                                       {"coefficients": [0, 0, 1], "expected": True}],
            },
            "leaf": {
                "chart": ["theta", "x", "y"],
                "params": {"a": 0.5, "b": -0.5},
                "embedding": ["theta", "x", "y", "a", "b"],
                "conserved": ["p_x", "p_y"],
                "values": ["a", "b"],
                "expected": {"d_leaf": _SKATE_LEAF_SECTIONS + [{"vector": {}, "form": _KNIFE}]},
            },
            "expected_failures": POSITIONAL_FAILURES,
        },
        {
            "name": "R2",
            "description": "translations",
            "generators": [["0", "1", "0"], ["0", "0", "1"]],
            "lift": True,
            "quotient": {"coords": ["theta", "p_x", "p_y"], "projection": ["theta", "p_x", "p_y"],
                         "slice": ["theta", "0", "0", "p_x", "p_y"]},
            "expected": {
                "d_red": [{"vector": {"theta": "1"}, "form": {"p_y": "s*cos(theta)", "p_x": "-s*sin(theta)"}},
                          {"vector": {}, "form": {"p_x": "cos(theta)", "p_y": "sin(theta)"}},
                          {"vector": {"p_x": "sin(theta)", "p_y": "-cos(theta)"}, "form": {"theta": "s"}}],
                "d_red_closed": False,
                "omega_hbar": [{"u": {"p_x": "sin(theta)", "p_y": "-cos(theta)"}, "v": {"theta": "1"}, "value": "s"}],
                "momentum_components": [{"coefficients": [1, 0], "value": "p_x"},
                                        {"coefficients": [0, 1], "value": "p_y"}],
                "noether_sections": [{"coefficients": ["cos(theta)", "sin(theta)"],
                                      "form": {"p_x": "cos(theta)", "p_y": "sin(theta)"}}],
                "horizontal_annihilator": [{"p_x": "sin(theta)", "p_y": "-cos(theta)"}, {"theta": "1"}, _FORWARD],
                "reaction": [_KNIFE],
                "optimal_distribution": [{"p_x": "sin(theta)", "p_y": "-cos(theta)"}, {"theta": "1"},
                                         {"x": "1"}, {"y": "1"}],
                "dg_involutive": False,
                "conserved_criteria": [{"coefficients": [1, 0], "expected": False},
                                       {"coefficients": [0, 1], "expected": False}],
            },
            "expected_failures": ["dg_involutive"],
        },
    ],
}

_ROTOR_A = ["sin(theta)/s"] + _SKATE_A
_ROTOR_B = ["-cos(theta)/s"] + _SKATE_B

SKATE_WITH_ROTOR: Dict[str, Any] = {
    "name": "skate_with_rotor",
    "description": "Chaplygin skate carrying a rotor of inertia J about its vertical axis",
    "chart": ["phi", "theta", "x", "y"],
    "params": {"m": 1.0, "s": 1.0, "J": 1.0},
    "metric": [["J", "J", "0", "0"],
               ["J", "m*s^2+J", "-m*s*sin(theta)", "m*s*cos(theta)"],
               ["0", "-m*s*sin(theta)", "m", "0"],
               ["0", "m*s*cos(theta)", "0", "m"]],
    "potential": "0",
    "constraints": [["0", "0", "sin(theta)", "-cos(theta)"]],
    "eliminate": ["p_theta"],
    "expected": {
        "eliminated": {"p_theta": "s*p_y*cos(theta)-s*p_x*sin(theta)+p_phi"},
        "omega_M": [["phi", "p_phi", "1"], ["x", "p_x", "1"], ["y", "p_y", "1"], ["theta", "p_phi", "1"],
                    ["theta", "p_y", "s*cos(theta)"], ["theta", "p_x", "-s*sin(theta)"]],
        "horizontal": [{"phi": "1"}, {"theta": "1"}, _FORWARD, {"p_phi": "1"}, {"p_x": "1"}, {"p_y": "1"}],
        "hamiltonian": "p_phi^2/(2*J)+(p_x^2+p_y^2)/(2*m)",
    },
    "actions": [{
        "name": "S1xSE2",
        "description": "rotor angle and rigid motions, written positionally",
        "generators": [["1", "0", "0", "0"], ["0", "1", "-y", "x"], ["0", "0", "1", "0"], ["0", "0", "0", "1"]],
        "structure_constants": [[2, 3, 4, 1.0], [2, 4, 3, -1.0]],
        "lift": False,
        "quotient": {"coords": ["p_phi", "p_x", "p_y"], "projection": ["p_phi", "p_x", "p_y"],
                     "slice": ["0", "0", "0", "0", "p_phi", "p_x", "p_y"]},
        "expected": {
            "d_red": [{"vector": {}, "form": {"p_phi": "1"}}, {"vector": {}, "form": {"p_x": "1"}},
                      {"vector": {}, "form": {"p_y": "1"}}],
            "d_red_closed": True,
            "noether_sections": [
                {"coefficients": ["1", "0", "0", "0"], "form": {"p_phi": "1"}},
                {"coefficients": ["0", "1", "y", "-x"],
                 "form": {"p_phi": "1", "p_y": "s*cos(theta)", "p_x": "-s*sin(theta)"}},
                {"coefficients": ["0", "0", "cos(theta)", "sin(theta)"],
                 "form": {"p_x": "cos(theta)", "p_y": "sin(theta)"}},
                {"coefficients": _ROTOR_A, "form": {"p_x": "1"}},
                {"coefficients": _ROTOR_B, "form": {"p_y": "1"}},
            ],
            "horizontal_annihilator": [{"phi": "1"}, {"theta": "1"}, _FORWARD],
            "reaction": [],
            "optimal_distribution": [{"phi": "1"}, {"theta": "1"}, {"x": "1"}, {"y": "1"}],
            "dg_involutive": True,
            "conserved_functions": ["p_phi", "p_x", "p_y"],
            "conserved_criteria": [{"coefficients": [1, 0, 0, 0], "expected": True},
                                   {"coefficients": [0, 1, 0, 0], "expected": True},
                                   {"coefficients": [0, 0, 1, 0], "expected": True},
                                   {"coefficients": [0, 0, 0, 1], "expected": True}],
        },
        "leaf": {
            "chart": ["phi", "theta", "x", "y"],
            "params": {"a": 0.5, "b": -0.5, "c": 1.0},
            "embedding": ["phi", "theta", "x", "y", "c", "a", "b"],
            "conserved": ["p_phi", "p_x", "p_y"],
            "values": ["c", "a", "b"],
            "expected": {"d_leaf": _SKATE_LEAF_SECTIONS + [{"vector": {"phi": "1"}, "form": {}},
                                                           {"vector": {}, "form": _KNIFE}]},
        },
        "expected_failures": POSITIONAL_FAILURES,
    }],
}

HEISENBERG_PARTICLE: Dict[str, Any] = {
    "name": "heisenberg_particle",
    "description": "Unit-mass particle in R^3 with dz = y dx - x dy",
    "chart": ["x", "y", "z"],
    "params": {},
    "metric": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
    "potential": "0",
    "constraints": [["-y", "x", "1"]],
    "eliminate": ["p_z"],
    "expected": {
        "eliminated": {"p_z": "y*p_x-x*p_y"},
        "omega_M": [["x", "p_x", "1"], ["y", "p_y", "1"], ["z", "y", "p_x"], ["z", "p_x", "y"],
                    ["z", "x", "-p_y"], ["z", "p_y", "-x"]],
        "horizontal": [{"x": "1", "z": "y"}, {"y": "-1", "z": "x"}, {"p_x": "1"}, {"p_y": "1"}],
        "dirac_sections": [
            {"vector": {"x": "1", "z": "y"},
             "form": {"p_x": "1+y^2", "p_y": "-x*y", "z": "p_y", "y": "y*p_x", "x": "-y*p_y"}},
            {"vector": {"y": "-1", "z": "x"},
             "form": {"p_y": "-(1+x^2)", "p_x": "x*y", "z": "p_x", "y": "x*p_x", "x": "-x*p_y"}},
            {"vector": {"p_x": "1"}, "form": {"x": "-1", "z": "-y"}},
            {"vector": {"p_y": "1"}, "form": {"y": "-1", "z": "x"}},
            {"vector": {}, "form": {"z": "1", "x": "-y", "y": "x"}},
        ],
        "hamiltonian": "(p_x^2+p_y^2+(y*p_x-x*p_y)^2)/2",
    },
    "actions": [{
        "name": "R",
        "description": "translations in z",
        "generators": [["0", "0", "1"]],
        "lift": True,
        "quotient": {"coords": ["x", "y", "p_x", "p_y"], "projection": ["x", "y", "p_x", "p_y"],
                     "slice": ["x", "y", "0", "p_x", "p_y"]},
        "expected": {
            "d_red_two_form": [["x", "p_x", "1+y^2"], ["y", "p_y", "1+x^2"], ["x", "y", "y*p_x-x*p_y"],
                               ["x", "p_y", "-x*y"], ["y", "p_x", "-x*y"]],
            "d_red_closed": False,
            "two_form_det": "(1+x^2+y^2)^2",
            "two_form_differential": [{"indices": ["x", "y", "p_x"], "value": "-2*y"},
                                      {"indices": ["x", "y", "p_y"], "value": "2*x"}],
            "omega_hbar": [{"u": {"x": "1"}, "v": {"p_x": "1"}, "value": "1+y^2"},
                           {"u": {"x": "1"}, "v": {"y": "1"}, "value": "y*p_x-x*p_y"}],
            "momentum_components": [{"coefficients": [1], "value": "y*p_x-x*p_y"}],
            "horizontal_annihilator": [{"x": "1", "z": "y"}, {"y": "-1", "z": "x"}, {"p_x": "1"}, {"p_y": "1"}],
            "reaction": [{"z": "1", "x": "-y", "y": "x"}],
            "optimal_distribution": [{"x": "1"}, {"y": "1"}, {"z": "1"}, {"p_x": "1"}, {"p_y": "1"}],
            "dg_involutive": True,
            "conserved_criteria": [{"coefficients": [1], "expected": False}],
        },
        "expected_failures": [],
    }],
}

CATALOG: Dict[str, Dict[str, Any]] = {
    doc["name"]: doc
    for doc in (CONSTRAINED_PARTICLE, VERTICAL_DISK, CHAPLYGIN_SKATE, SKATE_WITH_ROTOR, HEISENBERG_PARTICLE)
}


def names() -> List[str]:
    return list(CATALOG)


def document(name: str) -> Dict[str, Any]:
    """A private copy of the catalog document"""
    if name not in CATALOG:
        raise InputError(f"unknown system {name!r} (available: {names()})")
    return copy.deepcopy(CATALOG[name])


def load(name: str, params: Optional[Mapping[str, float]] = None, **options) -> SystemSetup:
    """Build a catalog system; params override the defaults of 1 and must be positive"""
    return build_system(document(name), params, **options)


def entries() -> List[Dict[str, Any]]:
    """Name, description, parameters and actions of every entry"""
    out = []
    for name, doc in CATALOG.items():
        out.append({"name": name, "description": doc["description"], "params": dict(doc["params"]),
                    "actions": [a["name"] for a in doc["actions"]]})
    return out
