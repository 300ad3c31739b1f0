#include "ser/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace ser {

namespace {

void check_finite_nonneg(const RealVector& v, const char* what) {
    for (Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i)))
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        if (v(i) < 0) throw std::invalid_argument(std::string(what) + ": negative entry");
    }
}

}  // namespace

WaterfillAllocation waterfill_direct(const RealVector& noise_floors, double budget,
                                     const Tolerances& tol) {
    tol.validate();
    if (budget < 0) throw NegativeBudget("waterfill_direct: negative budget");
    check_finite_nonneg(noise_floors, "waterfill_direct floors");
    const Index n = noise_floors.size();
    if (n == 0) {
        if (budget > 0) throw std::invalid_argument("waterfill_direct: no modes for a positive budget");
        return {RealVector(0), 0.0, 0.0};
    }

    // Sort floors ascending; the water level on the k-active segment is
    // (budget + Σ_{i<k} f_i)/k, valid while it stays below the next floor.
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return noise_floors(i) < noise_floors(j); });

    double level = noise_floors(order[0]);  // budget-0 convention: water at the lowest floor
    if (budget > 0) {
        double prefix = 0.0;
        for (Index k = 1; k <= n; ++k) {
            prefix += noise_floors(order[static_cast<std::size_t>(k - 1)]);
            const double candidate = (budget + prefix) / static_cast<double>(k);
            const double next_floor = (k < n) ? noise_floors(order[static_cast<std::size_t>(k)])
                                              : std::numeric_limits<double>::infinity();
            if (candidate <= next_floor) {
                level = candidate;
                break;
            }
        }
    }

    RealVector levels(n);
    for (Index i = 0; i < n; ++i) levels(i) = std::max(level - noise_floors(i), 0.0);
    const double used = levels.sum();
    if (std::abs(used - budget) > tol.bisect * (1.0 + budget) * 1e3)
        throw NumericalFailure("waterfill_direct: budget closure failed");
    return {std::move(levels), level, used};
}

WaterfillAllocation waterfill_weighted(const RealVector& floors, const RealVector& weights,
                                       double budget, const Tolerances& tol) {
    tol.validate();
    if (budget < 0) throw NegativeBudget("waterfill_weighted: negative budget");
    if (floors.size() != weights.size())
        throw DimensionMismatch("waterfill_weighted: floors/weights size mismatch");
    check_finite_nonneg(floors, "waterfill_weighted floors");
    const Index n = floors.size();

    // Usable modes: strictly positive weight. Disabled modes keep level 0.
    std::vector<Index> active;
    active.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        if (!std::isfinite(weights(i)))
            throw std::invalid_argument("waterfill_weighted: non-finite weight");
        if (weights(i) > 0) active.push_back(i);
    }
    if (active.empty()) {
        if (budget > 0) throw AllModesDisabled("waterfill_weighted: every mode has weight 0");
        return {RealVector::Zero(n), 0.0, 0.0};
    }

    // Budget(λ) = Σ (a_i λ − f_i)^+ is piecewise linear and increasing with
    // breakpoints f_i / a_i; scan segments and solve the active one exactly.
    std::vector<Index> order(active);
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
        return floors(i) / weights(i) < floors(j) / weights(j);
    });

    const std::size_t k_total = order.size();
    double sum_w = 0.0, sum_f = 0.0;
    double level = floors(order[0]) / weights(order[0]);  // budget-0 convention
    if (budget > 0) {
        for (std::size_t k = 0; k < k_total; ++k) {
            sum_w += weights(order[k]);
            sum_f += floors(order[k]);
            const double candidate = (budget + sum_f) / sum_w;
            const double next_break = (k + 1 < k_total)
                                          ? floors(order[k + 1]) / weights(order[k + 1])
                                          : std::numeric_limits<double>::infinity();
            if (candidate <= next_break) {
                level = candidate;
                break;
            }
        }
    }

    RealVector levels = RealVector::Zero(n);
    for (const Index i : active) levels(i) = std::max(weights(i) * level - floors(i), 0.0);
    const double used = levels.sum();
    if (std::abs(used - budget) > tol.bisect * (1.0 + budget) * 1e3)
        throw NumericalFailure("waterfill_weighted: budget closure failed");
    return {std::move(levels), level, used};
}

WaterfillAllocation waterfill_inverse(const RealVector& variances, double target_distortion,
                                      const Tolerances& tol) {
    tol.validate();
    check_finite_nonneg(variances, "waterfill_inverse variances");
    const Index n = variances.size();
    const double total = variances.sum();
    if (!(target_distortion > 0) || target_distortion > total * (1.0 + tol.rel))
        throw DistortionOutOfRange("waterfill_inverse: target " +
                                   std::to_string(target_distortion) +
                                   " outside (0, " + std::to_string(total) + "]");

    // Zero-variance modes contribute D_i = 0 and are excluded from the solve.
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        if (variances(i) > 0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return variances(i) < variances(j); });

    const std::size_t m = order.size();
    double xi = variances(order.back());  // full-distortion boundary
    if (target_distortion < total) {
        // D(ξ) = Σ_{v_i <= ξ} v_i + ξ · #{v_i > ξ}: scan ascending segments.
        double saturated = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double remaining = static_cast<double>(m - k);
            const double candidate = (target_distortion - saturated) / remaining;
            if (candidate <= variances(order[k])) {
                xi = candidate;
                break;
            }
            saturated += variances(order[k]);
        }
    }

    RealVector levels = RealVector::Zero(n);
    for (const Index i : order) levels(i) = std::min(xi, variances(i));
    const double used = levels.sum();
    const double closure_target = std::min(target_distortion, total);
    if (std::abs(used - closure_target) > tol.bisect * (1.0 + closure_target) * 1e3)
        throw NumericalFailure("waterfill_inverse: distortion closure failed");
    return {std::move(levels), xi, used};
}

double rate_from_allocation(const RealVector& variances, const WaterfillAllocation& alloc) {
    if (variances.size() != alloc.levels.size())
        throw DimensionMismatch("rate_from_allocation: size mismatch");
    double rate = 0.0;
    for (Index i = 0; i < variances.size(); ++i) {
        const double v = variances(i);
        const double d = alloc.levels(i);
        if (v <= 0) continue;  // excluded mode
        if (!(d > 0))
            throw std::invalid_argument("rate_from_allocation: zero distortion on a live mode");
        if (d < v) rate += std::log(v / d);
    }
    return rate;
}

}  // namespace ser
