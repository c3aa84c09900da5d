"""Gauss-Legendre quadrature on the unit disk."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from loguru import logger

from windscreen_optics.config import settings
from windscreen_optics.domain.exceptions import AccuracyError

DiskFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@lru_cache(maxsize=32)
def gauss_legendre(count: int, lower: float = -1.0, upper: float = 1.0):
    """Gauss-Legendre nodes and weights mapped to [lower, upper]."""
    nodes, weights = np.polynomial.legendre.leggauss(count)
    half = 0.5 * (upper - lower)
    nodes = half * nodes + 0.5 * (upper + lower)
    weights = half * weights
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True)
class DiskQuadrature:
    """Tensor rule: Gauss-Legendre in rho times uniform trapezoid in phi.

    The rho Jacobian is folded into the weights, so ``integrate`` returns
    the double integral of f over the disk with measure rho drho dphi.
    """

    radial_nodes: int = settings.QUADRATURE_RADIAL_NODES
    azimuthal_nodes: int = settings.QUADRATURE_AZIMUTHAL_NODES

    def nodes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (x, y, weight) arrays of the rule."""
        rho, w_rho = gauss_legendre(self.radial_nodes, 0.0, 1.0)
        phi = 2.0 * np.pi * np.arange(self.azimuthal_nodes) / self.azimuthal_nodes
        w_phi = 2.0 * np.pi / self.azimuthal_nodes
        rr, pp = np.meshgrid(rho, phi, indexing="ij")
        weights = np.outer(w_rho * rho, np.full(self.azimuthal_nodes, w_phi))
        return (rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel(), weights.ravel()

    def integrate(self, func: DiskFunction) -> float:
        x, y, w = self.nodes()
        return float(np.sum(w * func(x, y)))

    def coarse(self) -> "DiskQuadrature":
        """Rule with half the nodes in each direction, for error estimates."""
        return DiskQuadrature(
            radial_nodes=max(self.radial_nodes // 2, 1),
            azimuthal_nodes=max(self.azimuthal_nodes // 2, 1),
        )


def integrate_checked(
    func: DiskFunction,
    quadrature: DiskQuadrature | None = None,
    tolerance: float = settings.QUADRATURE_TOLERANCE,
) -> float:
    """
    Integrate over the disk and compare against a coarser rule.

    Args:
        func: Vectorized integrand f(x, y)
        quadrature: Rule to use, default settings rule
        tolerance: Accepted absolute/relative disagreement

    Returns:
        Integral value

    Raises:
        AccuracyError: If the two rules disagree beyond tolerance
    """
    rule = quadrature or DiskQuadrature()
    fine = rule.integrate(func)
    estimate = rule.coarse().integrate(func)
    residual = abs(fine - estimate)
    if residual > tolerance * max(1.0, abs(fine)):
        logger.warning(f"Disk quadrature not converged, residual {residual:.3e}")
        raise AccuracyError(
            f"Disk quadrature did not converge (residual estimate {residual:.3e})",
            residual=residual,
        )
    return fine
