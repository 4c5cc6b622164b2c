"""
Clarke and Park coordinate transforms between the abc, alpha-beta and dq frames.

Amplitude-invariant scaling: a balanced set of amplitude A maps to a dq
vector of length A. Zero-sequence content is discarded by ``clarke`` and
assumed absent by ``inverse_clarke`` (three-wire system).
"""

import math

from errors import UndefinedAngleError
from models.signals import DqPair, ThreePhase, TwoAxis

SQRT3_2 = math.sqrt(3.0) / 2.0
TWO_THIRDS = 2.0 / 3.0


def clarke(x: ThreePhase) -> TwoAxis:
    """abc -> alpha-beta, (2/3)-scaled."""
    alpha = TWO_THIRDS * (x.a - 0.5 * x.b - 0.5 * x.c)
    beta = TWO_THIRDS * SQRT3_2 * (x.b - x.c)
    return TwoAxis(alpha, beta)


def inverse_clarke(x: TwoAxis) -> ThreePhase:
    """alpha-beta -> abc; the result has zero sum."""
    a = x.alpha
    b = -0.5 * x.alpha + SQRT3_2 * x.beta
    c = -0.5 * x.alpha - SQRT3_2 * x.beta
    return ThreePhase(a, b, c)


def park(x: TwoAxis, theta: float) -> DqPair:
    """Rotate alpha-beta into the dq frame at angle ``theta``."""
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    return DqPair(cos_t * x.alpha + sin_t * x.beta, -sin_t * x.alpha + cos_t * x.beta)


def inverse_park(x: DqPair, theta: float) -> TwoAxis:
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    return TwoAxis(cos_t * x.d - sin_t * x.q, sin_t * x.d + cos_t * x.q)


def abc_to_dq(x: ThreePhase, theta: float) -> DqPair:
    return park(clarke(x), theta)


def dq_to_abc(x: DqPair, theta: float) -> ThreePhase:
    return inverse_clarke(inverse_park(x, theta))


def theta_from_voltage(x: TwoAxis) -> float:
    """Four-quadrant angle of the alpha-beta voltage vector in (-pi, pi]."""
    if x.alpha == 0.0 and x.beta == 0.0:
        raise UndefinedAngleError("voltage angle is undefined for a zero vector")
    theta = math.atan2(x.beta, x.alpha)
    # atan2 returns -pi for (negative, -0.0)
    return math.pi if theta == -math.pi else theta


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi
