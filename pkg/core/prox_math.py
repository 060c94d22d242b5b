"""
Núcleos escalares: perda check, penalidades MCP/SCAD e seus operadores
proximais, valor absoluto suavizado e cronogramas de parâmetros.

Todas as funções são puras. Aceitam escalares (contrato público) e, quando
marcado, também arrays numpy elemento a elemento.
"""

import math
from typing import Tuple

import numpy as np

from schemas import PenaltyKind, PenaltySpec, Schedule
from utils.errors import DomainError


def _check_tau(tau: float) -> None:
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau deve estar em (0,1), recebido {tau}")


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


def check_loss(u, tau: float):
    """ρ_τ(u) = ½(|u| + (2τ−1)u). Aceita arrays."""
    _check_tau(tau)
    u_arr = np.asarray(u, dtype=float)
    out = 0.5 * (np.abs(u_arr) + (2.0 * tau - 1.0) * u_arr)
    return _scalar_or_array(out, u)


def penalty_value(w, spec: PenaltySpec):
    """
    g_{λ,γ}(w) nas formas canônicas. Aceita arrays (elemento a elemento).

    MCP:  λ|w| − w²/(2γ) para |w| ≤ γλ, γλ²/2 além.
    SCAD: λ|w| para |w| ≤ λ, (2γλ|w| − w² − λ²)/(2(γ−1)) até γλ, λ²(γ+1)/2 além.
    """
    lam, gam = spec.lam, spec.gamma
    a = np.abs(np.asarray(w, dtype=float))
    if spec.kind is PenaltyKind.MCP:
        out = np.where(a <= gam * lam, lam * a - a * a / (2.0 * gam), 0.5 * gam * lam * lam)
    else:
        middle = (2.0 * gam * lam * a - a * a - lam * lam) / (2.0 * (gam - 1.0))
        out = np.where(
            a <= lam,
            lam * a,
            np.where(a <= gam * lam, middle, 0.5 * lam * lam * (gam + 1.0)),
        )
    return _scalar_or_array(out, w)


def penalty_derivative(w, spec: PenaltySpec):
    """Derivada de g fora da origem (em 0 devolve 0; o subdiferencial lá é [−λ, λ])."""
    lam, gam = spec.lam, spec.gamma
    w_arr = np.asarray(w, dtype=float)
    a = np.abs(w_arr)
    if spec.kind is PenaltyKind.MCP:
        mag = np.maximum(lam - a / gam, 0.0)
    else:
        mag = np.where(a <= lam, lam, np.maximum(gam * lam - a, 0.0) / (gam - 1.0))
    return _scalar_or_array(np.sign(w_arr) * mag, w)


def weak_convexity_modulus(spec: PenaltySpec) -> float:
    """ρ tal que g(x) + (ρ/2)x² é convexa: 1/γ (MCP), 1/(γ−1) (SCAD)."""
    if spec.kind is PenaltyKind.MCP:
        return 1.0 / spec.gamma
    return 1.0 / (spec.gamma - 1.0)


def _mcp_prox_magnitude(a: float, t: float, lam: float, gam: float) -> float:
    if a <= t * lam:
        return 0.0
    if a <= gam * lam:
        return (a - t * lam) / (1.0 - t / gam)
    return a


def _scad_prox_magnitude(a: float, t: float, lam: float, gam: float) -> float:
    if a <= lam + t * lam:
        return max(a - t * lam, 0.0)
    if a <= gam * lam:
        return ((gam - 1.0) * a - t * gam * lam) / (gam - 1.0 - t)
    return a


def _enumerate_prox_magnitude(a: float, t: float, spec: PenaltySpec) -> float:
    # subproblema não convexo: o mínimo global está num conjunto finito de candidatos
    lam, gam = spec.lam, spec.gamma
    soft = max(a - t * lam, 0.0)
    if spec.kind is PenaltyKind.MCP:
        candidates = [0.0, min(soft, gam * lam), gam * lam, a]
    else:
        candidates = [0.0, min(soft, lam), lam, gam * lam, a]
    best, best_val = 0.0, math.inf
    for x in sorted(set(candidates)):
        val = penalty_value(x, spec) + (x - a) ** 2 / (2.0 * t)
        if val < best_val:
            best, best_val = x, val
    return best


def prox_penalty(a: float, t: float, spec: PenaltySpec, zero_tol: float = 0.0) -> float:
    """
    argmin_x { g_{λ,γ}(x) + (x − a)²/(2t) }.

    Formas fechadas quando o subproblema é fortemente convexo (t < γ no MCP,
    t < γ−1 no SCAD); caso contrário enumera candidatos e desempata para o
    menor |x|. Calculado sobre |a| e depois reassinado, então é ímpar exatamente.

    Com zero_tol > 0 as formas fechadas também levam |a| ≤ tλ(1 + zero_tol)
    a 0; a enumeração ignora a folga.
    """
    if not t > 0:
        raise DomainError(f"passo t deve ser positivo, recebido {t}")
    if zero_tol < 0:
        raise DomainError(f"zero_tol deve ser não negativo, recebido {zero_tol}")
    a = float(a)
    mag = abs(a)
    if mag == 0.0:
        return 0.0
    lam, gam = spec.lam, spec.gamma
    convex = t < gam if spec.kind is PenaltyKind.MCP else t < gam - 1.0
    if not convex:
        x = _enumerate_prox_magnitude(mag, t, spec)
    elif mag <= t * lam * (1.0 + zero_tol):
        x = 0.0
    elif spec.kind is PenaltyKind.MCP:
        x = _mcp_prox_magnitude(mag, t, lam, gam)
    else:
        x = _scad_prox_magnitude(mag, t, lam, gam)
    return x if a > 0 else -x


def _check_mu(mu: float) -> None:
    if not mu > 0:
        raise DomainError(f"mu deve ser positivo, recebido {mu}")


def smooth_abs(z, mu: float):
    """f(z, μ) = |z| se |z| ≥ μ, z²/(2μ) + μ/2 caso contrário. Aceita arrays."""
    _check_mu(mu)
    z_arr = np.asarray(z, dtype=float)
    a = np.abs(z_arr)
    out = np.where(a >= mu, a, z_arr * z_arr / (2.0 * mu) + 0.5 * mu)
    return _scalar_or_array(out, z)


def smooth_abs_grad(z, mu: float):
    _check_mu(mu)
    z_arr = np.asarray(z, dtype=float)
    out = np.where(np.abs(z_arr) >= mu, np.sign(z_arr), z_arr / mu)
    return _scalar_or_array(out, z)


def prox_smooth_abs(x, thresh: float, mu: float):
    """
    argmin_z { f(z, μ) + (z − x)²/(2·thresh) }, em três ramos:
    x − thresh (x ≥ thresh+μ), x + thresh (x ≤ −(thresh+μ)), x/(1 + thresh/μ) no meio.

    `thresh` é a quantidade efetiva de encolhimento; quem chama deriva o valor
    do próprio subproblema. Aceita arrays.
    """
    if not thresh > 0:
        raise DomainError(f"thresh deve ser positivo, recebido {thresh}")
    _check_mu(mu)
    x_arr = np.asarray(x, dtype=float)
    edge = thresh + mu
    out = np.where(
        x_arr >= edge,
        x_arr - thresh,
        np.where(x_arr <= -edge, x_arr + thresh, x_arr / (1.0 + thresh / mu)),
    )
    return _scalar_or_array(out, x)


def soft_threshold(x, thresh: float):
    """argmin_z { |z| + (z − x)²/(2·thresh) } = sign(x)·max(|x| − thresh, 0). Aceita arrays."""
    if not thresh > 0:
        raise DomainError(f"thresh deve ser positivo, recebido {thresh}")
    x_arr = np.asarray(x, dtype=float)
    out = np.sign(x_arr) * np.maximum(np.abs(x_arr) - thresh, 0.0)
    return _scalar_or_array(out, x)


def schedule_at(k: int, s: Schedule) -> Tuple[float, float, float]:
    """(σΨ, σξ, μ) usados na iteração k → k+1; μ nunca fica abaixo de s.mu_min."""
    if k < 0:
        raise DomainError(f"k deve ser não negativo, recebido {k}")
    root = math.sqrt(k + 1)
    return s.c * root, s.d * root, max(s.beta / root, s.mu_min)
