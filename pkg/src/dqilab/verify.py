"""Self-check suite behind ``dqilab verify``.

Runs the exact identity oracles plus cross-checks between independent
numerical routes: closed form against dense simulation, classical noise
reduction against the density-matrix channel, syndrome-side norms against
state vectors, and the decoder correction matrix against exhaustive averaging.
"""

from __future__ import annotations

import math

import numpy as np

from .decoder_lab import (
    DecoderPolicy,
    abar_score,
    averaged_over_sets,
    build_Abar_D,
    build_Abar_E,
    build_D_correction,
    build_decoder,
    build_imperfect_state,
    correction_bound,
    expected_score_imperfect,
    norm_binary,
    norm_lemma_check,
)
from .dqi_state import AmplitudeVector, DqiCoefficients, build_dqi_state, fourier_state, gram_matrix
from .fp_linalg import check_distance_condition
from .instance import make_random_instance
from .noise import NoiseModel, expected_score_exact, noisy_output_distribution
from .oracles import LemmaResult, density_matrix_oracle, lemma_suite
from .predictor import expected_score_theorem1


def distance_instances(count: int, seed=0, primes=(2, 3, 5), max_n: int = 6, max_m: int = 10, max_l: int = 2,
                       max_dim: int = 5**6, tries: int = 10_000) -> list:
    """Seeded random ``(instance, l, check)`` triples with ``2l + 1 < d_perp``.

    Row counts are drawn just above ``n`` so that a high dual distance is
    plausible; candidates failing the check are discarded.
    """
    rng = np.random.default_rng(seed)
    found = []
    for _ in range(tries):
        if len(found) == count:
            break
        p = int(rng.choice(primes))
        n = int(rng.integers(1, max_n + 1))
        if p**n > max_dim:
            continue
        m = int(rng.integers(n + 1, min(max_m, n + 3) + 1))
        l = int(rng.integers(0, min(max_l, m) + 1))
        r = int(rng.integers(1, p))
        inst = make_random_instance(p, m, n, r, int(rng.integers(2**32)))
        dc = check_distance_condition(inst.B, l)
        if dc.holds:
            found.append((inst, l, dc))
    if len(found) < count:
        raise RuntimeError(f"only {len(found)} of {count} distance-satisfying instances found")
    return found


def random_coefficients(l: int, rng) -> DqiCoefficients:
    return DqiCoefficients(rng.normal(size=l + 1) + 1j * rng.normal(size=l + 1)).normalized()


def random_state(p: int, n: int, rng) -> AmplitudeVector:
    a = rng.normal(size=p**n) + 1j * rng.normal(size=p**n)
    return AmplitudeVector(a / np.linalg.norm(a), p, n)


class _Check:
    def __init__(self, name):
        self.name, self.cases, self.failures, self.first = name, 0, 0, ""

    def add(self, ok: bool, detail: str):
        self.cases += 1
        if not ok:
            self.failures += 1
            self.first = self.first or detail

    def result(self) -> LemmaResult:
        return LemmaResult(self.name, self.cases, self.failures, self.first)


def check_closed_form(count: int = 20, seed: int = 0, tol: float = 1e-9) -> LemmaResult:
    c = _Check("closed-form-matches-simulation")
    rng = np.random.default_rng(seed + 1)
    for inst, l, dc in distance_instances(count, seed):
        coeffs = random_coefficients(l, rng)
        state = build_dqi_state(inst, coeffs)
        for eps in (0.0, 0.1, 0.3, 0.7):
            noise = NoiseModel(eps)
            ex = expected_score_exact(inst, state, noise)
            th = expected_score_theorem1(inst, coeffs, noise, distance_check=dc)
            c.add(abs(ex - th) <= tol, f"p={inst.p} m={inst.m} n={inst.n} l={l} eps={eps}: {ex} vs {th}")
    return c.result()


def check_channel(states: int = 100, seed: int = 0, tol: float = 1e-12) -> LemmaResult:
    c = _Check("classical-noise-reduction")
    rng = np.random.default_rng(seed)
    for p in (2, 3):
        for n in (1, 2):
            for _ in range(states):
                st = random_state(p, n, rng)
                for eps in (0.0, 0.25, 1.0):
                    a = noisy_output_distribution(st, NoiseModel(eps))
                    b = density_matrix_oracle(st, NoiseModel(eps))
                    c.add(np.max(np.abs(a - b)) <= tol, f"p={p} n={n} eps={eps}")
    return c.result()


def _norm_cases(seed: int):
    """Instances with and without the distance condition, with and without failures."""
    rng = np.random.default_rng(seed)
    out = []
    for p, m, n, r, l, inject in [
        (2, 6, 3, 1, 2, {}),
        (2, 7, 4, 1, 2, {1: 0.3}),
        (3, 5, 3, 1, 2, {}),
        (3, 4, 2, 2, 2, {2: 0.5}),
        (5, 4, 3, 2, 1, {1: 0.25}),
        (2, 5, 4, 1, 2, {}),
    ]:
        inst = make_random_instance(p, m, n, r, int(rng.integers(2**32)))
        table, part = build_decoder(inst, l, DecoderPolicy(inject, seed=1))
        out.append((inst, l, table, part))
    for inst, l, _ in distance_instances(3, seed=seed + 100, max_n=4, max_m=6):
        out.append((inst, l, *build_decoder(inst, l)))
    return out


def check_norms(seed: int = 0, tol: float = 1e-9) -> list:
    gram, lemma, binary = _Check("gram-norm-identity"), _Check("imperfect-state-norm"), _Check("binary-norm-formula")
    rng = np.random.default_rng(seed)
    for inst, l, table, part in _norm_cases(seed):
        coeffs = random_coefficients(l, rng)
        state = build_dqi_state(inst, coeffs)
        M = gram_matrix(inst, l)
        wMw = float(np.real(np.conj(coeffs.w) @ M @ coeffs.w))
        tilde = fourier_state(state)
        gram.add(abs(tilde.norm_sq - wMw) <= tol, f"p={inst.p} m={inst.m}: {tilde.norm_sq} vs {wMw}")
        lhs, rhs = norm_lemma_check(inst, coeffs, table)
        lemma.add(abs(lhs - rhs) <= tol, f"p={inst.p} m={inst.m}: {lhs} vs {rhs}")
        if inst.p == 2:
            b = norm_binary(coeffs, part)
            binary.add(abs(lhs - b) <= tol, f"m={inst.m}: {lhs} vs {b}")
    return [gram.result(), lemma.result(), binary.result()]


def check_decoder_matrices(seed: int = 0, tol: float = 1e-9) -> list:
    ab, corr, bound = _Check("abar-matches-simulation"), _Check("correction-matrix"), _Check("correction-norm-bound")
    rng = np.random.default_rng(seed)
    noise = NoiseModel(0.2)
    for inst, l, table, part in _norm_cases(seed):
        coeffs = random_coefficients(l, rng)
        sim = expected_score_imperfect(inst, coeffs, noise, table)
        via = abar_score(build_Abar_D(inst, noise, table, l), coeffs, build_imperfect_state(inst, coeffs, table).norm_sq)
        ab.add(abs(sim - via) <= tol, f"p={inst.p} m={inst.m}: {sim} vs {via}")
        if inst.p ** inst.m <= 2**8 or math.comb(inst.p, inst.r) ** inst.m <= 3**5:
            EAE = averaged_over_sets(inst, lambda I: build_Abar_E(I, noise, l))
            EAD = averaged_over_sets(inst, lambda I: build_Abar_D(I, noise, table, l))
            Dc = build_D_correction(inst, noise, part, check_bound=False)
            err = float(np.max(np.abs(EAE - EAD - Dc)))
            corr.add(err <= tol, f"p={inst.p} m={inst.m}: max error {err}")
        if inst.p == 2 and inst.r == 1:
            Dc = build_D_correction(inst, noise, part, check_bound=False)
            dist, bnd = correction_bound(inst, noise, part, Dc)
            bound.add(dist <= bnd + 1e-12, f"m={inst.m}: {dist} > {bnd}")
    return [ab.result(), corr.result(), bound.result()]


def run_verification(quick: bool = False, damping=None, seed: int = 0) -> list:
    if quick:
        results = lemma_suite(primes=(2, 3, 5), max_t=4, max_n=5, seed=seed, damping=damping)
        results.append(check_closed_form(count=6, seed=seed))
        results.append(check_channel(states=10, seed=seed))
    else:
        results = lemma_suite(seed=seed, damping=damping)
        results.append(check_closed_form(seed=seed))
        results.append(check_channel(seed=seed))
    results.extend(check_norms(seed))
    results.extend(check_decoder_matrices(seed))
    return results
