"""Small Mahler systems used by the self-check suite, the tests and the README."""

from __future__ import annotations

import copy

from .mahler import MahlerSystem

# f(z) = z + f(z^2), G = (f, 1)
FREDHOLM = {"q": 2, "matrix": [["1", "z"], ["0", "1"]], "seeds": {"0": ["0", "1"]}, "distinguished": 0}

# T(z) = (1 - z) T(z^2), coefficients (-1)^(binary digit sum)
THUE_MORSE = {"q": 2, "matrix": [["1 - z"]], "seeds": {"0": ["1"]}, "distinguished": 0}

# 1/(1 - z) = (1 + z) / (1 - z^2)
GEOMETRIC = {"q": 2, "matrix": [["1 + z"]], "seeds": {"0": ["1"]}, "distinguished": 0}

# sum z^(3^n)
CUBE_LACUNARY = {"q": 3, "matrix": [["1", "z"], ["0", "1"]], "seeds": {"0": ["0", "1"]}, "distinguished": 0}

# pole of A at z = 1/2
POLE = {"q": 2, "matrix": [["1/(1 - 2*z)"]], "seeds": {"0": ["1"]}, "distinguished": 0}

SAMPLES = {
    "fredholm": FREDHOLM,
    "thue-morse": THUE_MORSE,
    "geometric": GEOMETRIC,
    "cube-lacunary": CUBE_LACUNARY,
}


def system(name: str) -> MahlerSystem:
    table = dict(SAMPLES, pole=POLE)
    return MahlerSystem.from_json(copy.deepcopy(table[name]))


def cert_input(points, radices=None, systems=None, attested=True) -> dict:
    """Certificate input with one entry per point.

    By default entry ``i`` uses the lacunary series ``sum z^(q_i^n)``.
    """
    radices = radices or [2] * len(points)
    out = []
    for i, (p, q) in enumerate(zip(points, radices)):
        sysd = copy.deepcopy(systems[i] if systems else FREDHOLM)
        sysd["q"] = q
        out.append({"q": q, "system": sysd, "point": p,
                    "attestation": {"not_in_field": attested,
                                    "provenance": "lacunary series value, transcendence known"}})
    return {"entries": out}
