#include "mdens/optimize.hpp"

#include "mdens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdens {
namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Vertex {
    std::vector<double> x;
    double f;
};

class Simplex {
public:
    Simplex(const Objective& objective, std::vector<double> start, double start_value,
            std::span<const double> steps)
        : objective_(objective), dim_(start.size()) {
        vertices_.push_back({start, start_value});
        for (std::size_t i = 0; i < dim_; ++i) {
            auto x = start;
            x[i] += steps[i];
            vertices_.push_back({x, evaluate(x)});
        }
        order();
    }

    double evaluate(std::span<const double> x) const {
        const double value = objective_(x);
        return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
    }

    void step() {
        const auto centroid = centroid_without_worst();
        Vertex& worst = vertices_.back();
        const Vertex& best = vertices_.front();
        const double second_worst = vertices_[dim_ - 1].f;

        auto reflected = along(centroid, worst.x, -kReflect);
        const double fr = evaluate(reflected);

        if (fr < best.f) {
            auto expanded = along(centroid, worst.x, -kExpand);
            const double fe = evaluate(expanded);
            if (fe < fr) {
                worst = {std::move(expanded), fe};
            } else {
                worst = {std::move(reflected), fr};
            }
        } else if (fr < second_worst) {
            worst = {std::move(reflected), fr};
        } else if (fr < worst.f) {
            auto contracted = along(centroid, worst.x, -kContract);
            const double fc = evaluate(contracted);
            if (fc <= fr) {
                worst = {std::move(contracted), fc};
            } else {
                shrink();
            }
        } else {
            auto contracted = along(centroid, worst.x, kContract);
            const double fc = evaluate(contracted);
            if (fc < worst.f) {
                worst = {std::move(contracted), fc};
            } else {
                shrink();
            }
        }
        order();
    }

    [[nodiscard]] double diameter() const {
        double d = 0.0;
        const auto& best = vertices_.front().x;
        for (std::size_t v = 1; v < vertices_.size(); ++v) {
            for (std::size_t i = 0; i < dim_; ++i) {
                d = std::max(d, std::fabs(vertices_[v].x[i] - best[i]));
            }
        }
        return d;
    }

    [[nodiscard]] const Vertex& best() const { return vertices_.front(); }

private:
    // centroid + factor * (point - centroid)
    std::vector<double> along(const std::vector<double>& centroid, const std::vector<double>& point,
                              double factor) const {
        std::vector<double> out(dim_);
        for (std::size_t i = 0; i < dim_; ++i) out[i] = centroid[i] + factor * (point[i] - centroid[i]);
        return out;
    }

    std::vector<double> centroid_without_worst() const {
        std::vector<double> c(dim_, 0.0);
        for (std::size_t v = 0; v < dim_; ++v) {
            for (std::size_t i = 0; i < dim_; ++i) c[i] += vertices_[v].x[i];
        }
        for (double& ci : c) ci /= static_cast<double>(dim_);
        return c;
    }

    void shrink() {
        const auto best = vertices_.front().x;
        for (std::size_t v = 1; v < vertices_.size(); ++v) {
            for (std::size_t i = 0; i < dim_; ++i) {
                vertices_[v].x[i] = best[i] + kShrink * (vertices_[v].x[i] - best[i]);
            }
            vertices_[v].f = evaluate(vertices_[v].x);
        }
    }

    // Stable so that ties keep the incumbent best in front.
    void order() {
        std::stable_sort(vertices_.begin(), vertices_.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    }

    const Objective& objective_;
    std::size_t dim_;
    std::vector<Vertex> vertices_;
};

}  // namespace

void OptimizerConfig::validate() const {
    if (!(tolerance > 0.0)) throw InvalidParameter("optimizer tolerance must be > 0");
    if (max_iterations < 1) throw InvalidParameter("optimizer max_iterations must be >= 1");
    if (restarts < 0) throw InvalidParameter("optimizer restarts must be >= 0");
    if (!(initial_step > 0.0)) throw InvalidParameter("optimizer initial_step must be > 0");
}

OptimizeResult optimize(const Objective& objective, std::span<const double> init,
                        const OptimizerConfig& config, std::span<const double> steps) {
    config.validate();
    const std::size_t dim = init.size();
    std::vector<double> step_sizes(dim, config.initial_step);
    if (!steps.empty()) {
        if (steps.size() != dim) throw InvalidParameter("optimizer steps must match dimension");
        std::copy(steps.begin(), steps.end(), step_sizes.begin());
    }

    OptimizeResult result;
    result.argmin.assign(init.begin(), init.end());
    result.value = objective(init);
    if (!std::isfinite(result.value)) {
        throw InvalidStart("objective is not finite at the initial point");
    }
    if (dim == 0) {
        result.converged = true;
        return result;
    }

    for (int run = 0; run <= config.restarts; ++run) {
        Simplex simplex(objective, result.argmin, result.value, step_sizes);
        const double run_start = result.value;
        bool converged = false;
        for (int it = 0; it < config.max_iterations; ++it) {
            if (simplex.diameter() < config.tolerance) {
                converged = true;
                break;
            }
            simplex.step();
            ++result.iterations;
            result.best_trace.push_back(simplex.best().f);
        }
        if (!converged) converged = simplex.diameter() < config.tolerance;

        result.argmin = simplex.best().x;
        result.value = simplex.best().f;
        result.converged = converged;

        const double gain = run_start - result.value;
        if (run > 0 && converged && gain <= config.tolerance * (1.0 + std::fabs(result.value))) {
            break;
        }
    }
    return result;
}

}  // namespace mdens
