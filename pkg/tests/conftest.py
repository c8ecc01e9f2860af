import math

import numpy as np
import pytest

from kmsplit.hilbert import L2Space, QuadratureGrid, inner, norm


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def l2(a, b, n):
    return L2Space(QuadratureGrid(a, b, n))


def random_element(space, rng, scale=1.0):
    return space.element(scale * rng.standard_normal(space.dim))


def random_unit(space, rng):
    x = random_element(space, rng)
    return x * (1.0 / norm(x))


def directional_derivative(f, x, h, eps=1e-4):
    """Central difference of a scalar functional along h."""
    scale = eps * (1.0 + norm(x)) / (1.0 + norm(h))
    return (f(x + scale * h) - f(x - scale * h)) / (2.0 * scale)


def assert_gradient_matches(f, grad, x, h, rel=1e-5):
    fd = directional_derivative(f, x, h)
    an = inner(grad(x), h)
    assert an == pytest.approx(fd, rel=rel, abs=1e-12), \
        f"directional derivative {fd} vs gradient pairing {an}"


TWO_PI = 2.0 * math.pi
