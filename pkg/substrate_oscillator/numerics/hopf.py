"""First Lyapunov coefficient of a planar Hopf point."""

import logging

import numpy as np

from substrate_oscillator.exceptions import ConvergenceError
from substrate_oscillator.numerics.equilibria import jacobian_fd
from substrate_oscillator.numerics.integrate import IvpField

logger = logging.getLogger(__name__)


def hopf_basis(jacobian: np.ndarray) -> tuple[np.ndarray, float]:
    """(P, omega) with P^-1 J P = [[0, -omega], [omega, 0]] for the centre part of J."""
    eigenvalues, eigenvectors = np.linalg.eig(jacobian)
    index = int(np.argmax(eigenvalues.imag))
    omega = float(eigenvalues[index].imag)
    if omega <= 0:
        raise ConvergenceError("no complex eigenvalue pair at the Hopf point")
    v = eigenvectors[:, index]
    basis = np.column_stack([v.imag, v.real])
    basis /= np.max(np.abs(basis))
    return basis, omega


def first_lyapunov_coefficient(field: IvpField, point, h: float = 1e-3) -> float:
    """Sign-carrying first Lyapunov coefficient at a planar Hopf point.

    Writes the field in the eigenbasis of its linear part and evaluates the
    normal-form expression

        16 a = f_xxx + f_xyy + g_xxy + g_yyy
               + (f_xy (f_xx + f_yy) - g_xy (g_xx + g_yy) - f_xx g_xx + f_yy g_yy) / omega

    with central differences of step ``h``. a > 0 means a subcritical Hopf bifurcation.
    """
    u0 = np.asarray(point, dtype=float)
    basis, omega = hopf_basis(jacobian_fd(field, u0))
    inverse = np.linalg.inv(basis)

    def F(a: float, b: float) -> np.ndarray:
        return inverse @ np.asarray(field(0.0, u0 + basis @ np.array([a, b])))

    c = F(0.0, 0.0)
    px, mx = F(h, 0.0), F(-h, 0.0)
    py, my = F(0.0, h), F(0.0, -h)
    pp, pm, mp, mm = F(h, h), F(h, -h), F(-h, h), F(-h, -h)
    p2x, m2x = F(2 * h, 0.0), F(-2 * h, 0.0)
    p2y, m2y = F(0.0, 2 * h), F(0.0, -2 * h)

    d_xx = (px - 2 * c + mx) / h**2
    d_yy = (py - 2 * c + my) / h**2
    d_xy = (pp - pm - mp + mm) / (4 * h**2)
    d_xxx = (p2x - 2 * px + 2 * mx - m2x) / (2 * h**3)
    d_yyy = (p2y - 2 * py + 2 * my - m2y) / (2 * h**3)
    d_xyy = (pp - 2 * px + pm - mp + 2 * mx - mm) / (2 * h**3)
    d_xxy = (pp - 2 * py + mp - pm + 2 * my - mm) / (2 * h**3)

    f, g = 0, 1
    a = (
        d_xxx[f]
        + d_xyy[f]
        + d_xxy[g]
        + d_yyy[g]
        + (
            d_xy[f] * (d_xx[f] + d_yy[f])
            - d_xy[g] * (d_xx[g] + d_yy[g])
            - d_xx[f] * d_xx[g]
            + d_yy[f] * d_yy[g]
        )
        / omega
    ) / 16.0
    logger.debug(f"First Lyapunov coefficient {a:.6e} (omega {omega:.6g})")
    return float(a)
