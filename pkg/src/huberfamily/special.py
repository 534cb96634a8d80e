"""Special functions behind the t and chi-square reference tests."""

import math

from huberfamily.errors import InputError

# Lanczos approximation, g = 7, nine terms
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 500


def ln_gamma(z: float) -> float:
    """log |Gamma(z)| for real z that is not a nonpositive integer."""
    if z <= 0 and z == math.floor(z):
        raise InputError(f"ln_gamma has a pole at {z}")
    if z < 0.5:
        # reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return math.log(math.pi / abs(math.sin(math.pi * z))) - ln_gamma(1.0 - z)
    z -= 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(acc)


def _beta_cf(a, b, x):
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not (a > 0 and b > 0):
        raise InputError("reg_inc_beta needs a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise InputError("reg_inc_beta needs x in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _inc_gamma(s, x):
    """(P(s, x), Q(s, x)), each computed on the side where it is accurate."""
    if not s > 0:
        raise InputError("incomplete gamma needs s > 0")
    if x < 0:
        raise InputError("incomplete gamma needs x >= 0")
    if x == 0:
        return 0.0, 1.0
    log_front = -x + s * math.log(x) - ln_gamma(s)
    if x < s + 1.0:
        term = 1.0 / s
        total = term
        ap = s
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                p = total * math.exp(log_front)
                return p, 1.0 - p
        raise ArithmeticError("lower gamma series did not converge")
    # continued fraction for Q(s, x), modified Lentz
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        d = _TINY if abs(d) < _TINY else d
        c = b + an / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            q = math.exp(log_front) * h
            return 1.0 - q, q
    raise ArithmeticError("upper gamma fraction did not converge")


def reg_lower_gamma(s: float, x: float) -> float:
    """Regularized lower incomplete gamma P(s, x)."""
    return _inc_gamma(s, x)[0]


def t_cdf(t: float, df: float) -> float:
    if not df > 0:
        raise InputError("t_cdf needs df > 0")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def t_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|), computed without cancellation."""
    if not df > 0:
        raise InputError("t_two_sided needs df > 0")
    if math.isinf(t):
        return 0.0
    return min(1.0, reg_inc_beta(0.5 * df, 0.5, df / (df + t * t)))


def chi2_cdf(x: float, df: float) -> float:
    if not df > 0:
        raise InputError("chi2_cdf needs df > 0")
    if x <= 0:
        return 0.0
    return _inc_gamma(0.5 * df, 0.5 * x)[0]


def chi2_sf(x: float, df: float) -> float:
    """Upper tail P(X >= x)."""
    if not df > 0:
        raise InputError("chi2_sf needs df > 0")
    if x <= 0:
        return 1.0
    return _inc_gamma(0.5 * df, 0.5 * x)[1]


SPECIAL_FUNCTIONS = {
    "LN_GAMMA": ln_gamma,
    "REG_INC_BETA": reg_inc_beta,
    "T_CDF": t_cdf,
    "CHI2_CDF": chi2_cdf,
}


def special_function(kind: str, *args: float) -> float:
    try:
        fn = SPECIAL_FUNCTIONS[kind.upper()]
    except KeyError:
        raise InputError(f"unknown special function {kind!r}") from None
    return fn(*args)
