#pragma once

// The three water-filling solvers everything else is built on:
//
//   direct:   levels_i = (λ − floor_i)^+        Σ levels = budget
//   weighted: levels_i = (a_i λ_m − floor_i)^+  Σ levels = budget
//   inverse:  D_i = min(ξ, σ²_i)                Σ D_i = target distortion
//
// Water levels are found exactly by sorting the activation breakpoints and
// solving the piecewise-linear budget equation on the right segment, so the
// closure error is pure floating-point rounding.

#include "ser/core.hpp"

namespace ser {

struct WaterfillAllocation {
    RealVector levels;        // per-mode power or distortion, caller's order
    double water_level = 0;   // λ, λ_m, or ξ
    double budget_used = 0;   // Σ levels
};

/// Classic water-filling. Modes with a non-finite floor are rejected
/// (exclude them upstream). A zero budget yields all-zero levels with the
/// water level at the smallest floor (continuous limit).
WaterfillAllocation waterfill_direct(const RealVector& noise_floors, double budget,
                                     const Tolerances& tol = {});

/// Weighted water-filling (per-mode slope a_i). Modes with weight <= 0 are
/// treated as disabled and receive zero power; throws AllModesDisabled when
/// no mode is usable and the budget is positive.
WaterfillAllocation waterfill_weighted(const RealVector& floors, const RealVector& weights,
                                       double budget, const Tolerances& tol = {});

/// Reverse water-filling of a total distortion over per-mode variances.
/// Zero-variance modes get D_i = 0 and are excluded from the solve.
WaterfillAllocation waterfill_inverse(const RealVector& variances, double target_distortion,
                                      const Tolerances& tol = {});

/// Gaussian rate-distortion value Σ ln(σ²_i / D_i) in nats for an
/// allocation produced by waterfill_inverse on the same variances.
double rate_from_allocation(const RealVector& variances, const WaterfillAllocation& alloc);

}  // namespace ser
