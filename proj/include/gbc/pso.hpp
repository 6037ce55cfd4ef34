#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "gbc/common.hpp"

namespace gbc {

struct PsoConfig {
    int particles = 30;
    int iterations = 200;
    double inertia = 0.729;
    double cognitive = 1.49;
    double social = 1.49;
    std::uint64_t seed = 0;
    // Independent swarm restarts used by callers that need global quality
    // (the rounded cut landscape has deep local basins a single swarm can
    // converge into). pso_minimize itself runs one swarm.
    int restarts = 3;
};

struct PsoResult {
    std::vector<double> position;
    double value = 0.0;
};

/**
 * Global-best particle swarm minimizer over a box [lo, hi]^dim with velocity
 * clamping. Caller-supplied positions are injected as the first particles
 * (zero initial velocity), so the result is never worse than the best seed.
 */
inline PsoResult pso_minimize(int dim, std::span<const double> lo, std::span<const double> hi,
                              double velocity_clamp,
                              const std::function<double(std::span<const double>)>& objective,
                              const PsoConfig& cfg,
                              const std::vector<std::vector<double>>& seed_positions = {}) {
    if (dim <= 0) {
        PsoResult r;
        r.value = objective({});
        return r;
    }
    if (cfg.particles < 2) throw InputError("pso_minimize: need at least two particles");
    if (cfg.iterations < 1) throw InputError("pso_minimize: need at least one iteration");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n = cfg.particles;
    std::vector<std::vector<double>> pos(n, std::vector<double>(dim));
    std::vector<std::vector<double>> vel(n, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> pbest(n);
    std::vector<double> pbest_val(n);

    for (int i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(i) < seed_positions.size()) {
            for (int d = 0; d < dim; ++d)
                pos[i][d] = std::clamp(seed_positions[i][d], lo[d], hi[d]);
        } else {
            for (int d = 0; d < dim; ++d) {
                pos[i][d] = lo[d] + unit(rng) * (hi[d] - lo[d]);
                vel[i][d] = (unit(rng) - 0.5) * velocity_clamp;
            }
        }
        pbest[i] = pos[i];
        pbest_val[i] = objective(pos[i]);
    }

    int gbest = 0;
    for (int i = 1; i < n; ++i)
        if (pbest_val[i] < pbest_val[gbest]) gbest = i;

    for (int it = 0; it < cfg.iterations; ++it) {
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < dim; ++d) {
                const double r1 = unit(rng);
                const double r2 = unit(rng);
                double v = cfg.inertia * vel[i][d] + cfg.cognitive * r1 * (pbest[i][d] - pos[i][d]) +
                           cfg.social * r2 * (pbest[gbest][d] - pos[i][d]);
                v = std::clamp(v, -velocity_clamp, velocity_clamp);
                vel[i][d] = v;
                pos[i][d] = std::clamp(pos[i][d] + v, lo[d], hi[d]);
            }
            const double val = objective(pos[i]);
            if (val < pbest_val[i]) {
                pbest_val[i] = val;
                pbest[i] = pos[i];
                if (val < pbest_val[gbest]) gbest = i;
            }
        }
    }
    return {pbest[gbest], pbest_val[gbest]};
}

}  // namespace gbc
