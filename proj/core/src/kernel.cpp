#include "mdens/kernel.hpp"

#include "mdens/error.hpp"

#include <algorithm>
#include <cmath>

namespace mdens {
namespace {

// Antiderivatives of K on [-1, 1], normalized so that F(-1) = 0.
double quadratic_cdf(double u) {
    u = std::clamp(u, -1.0, 1.0);
    return 0.75 * (u - u * u * u / 3.0) + 0.5;
}

double biweight_cdf(double u) {
    u = std::clamp(u, -1.0, 1.0);
    const double u3 = u * u * u;
    return 15.0 / 16.0 * (u - 2.0 * u3 / 3.0 + u3 * u * u / 5.0) + 0.5;
}

}  // namespace

double kernel_eval(KernelSpec k, double u) {
    if (!(std::fabs(u) <= 1.0)) return 0.0;
    const double w = 1.0 - u * u;
    switch (k.family) {
        case KernelFamily::Quadratic:
            return 0.75 * w;
        case KernelFamily::Biweight:
            return 0.9375 * w * w;
    }
    return 0.0;
}

double kernel_integral(KernelSpec k, double lo, double hi) {
    switch (k.family) {
        case KernelFamily::Quadratic:
            return quadratic_cdf(hi) - quadratic_cdf(lo);
        case KernelFamily::Biweight:
            return biweight_cdf(hi) - biweight_cdf(lo);
    }
    return 0.0;
}

double kernel_convolution(KernelSpec k, double u) {
    const double a = std::fabs(u);
    if (!(a < 2.0)) return 0.0;
    const double r = 2.0 - a;
    switch (k.family) {
        case KernelFamily::Quadratic:
            return 3.0 / 160.0 * r * r * r * (a * a + 6.0 * a + 4.0);
        case KernelFamily::Biweight: {
            const double r5 = r * r * r * r * r;
            const double a2 = a * a;
            return 5.0 / 3584.0 * r5 * (a2 * a2 + 10.0 * a2 * a + 36.0 * a2 + 40.0 * a + 16.0);
        }
    }
    return 0.0;
}

KernelSpec parse_kernel(std::string_view text) {
    if (text == "quadratic" || text == "epanechnikov") return {KernelFamily::Quadratic};
    if (text == "biweight") return {KernelFamily::Biweight};
    throw InvalidSpec("unknown kernel '" + std::string(text) + "' (expected quadratic, biweight)");
}

std::string to_string(KernelSpec k) {
    return k.family == KernelFamily::Quadratic ? "quadratic" : "biweight";
}

}  // namespace mdens
