#include "mdens/innovations.hpp"

#include "mdens/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mdens {
namespace {

double student_log_norm(double dof) {
    return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
           0.5 * std::log(dof * std::numbers::pi);
}

double student_draw(double dof, RngStream& stream) {
    const double z = stream.normal();
    const double chi2 = 2.0 * sample_gamma(0.5 * dof, stream);
    return z / std::sqrt(chi2 / dof);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw InvalidSpec("cannot parse degrees of freedom '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

void InnovationSpec::validate() const {
    switch (family) {
        case InnovationFamily::Gaussian:
            return;
        case InnovationFamily::StudentT:
            if (!(dof > 0.0) || !std::isfinite(dof)) {
                throw InvalidSpec("Student-t innovations require dof > 0");
            }
            return;
        case InnovationFamily::StandardizedStudentT:
            if (!(dof > 2.0) || !std::isfinite(dof)) {
                throw InvalidSpec("standardized Student-t innovations require dof > 2");
            }
            return;
    }
    throw InvalidSpec("unknown innovation family");
}

double InnovationSpec::variance() const {
    validate();
    switch (family) {
        case InnovationFamily::Gaussian:
        case InnovationFamily::StandardizedStudentT:
            return 1.0;
        case InnovationFamily::StudentT:
            return dof > 2.0 ? dof / (dof - 2.0) : std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::quiet_NaN();
}

double sample_gamma(double shape, RngStream& stream) {
    if (!(shape > 0.0)) throw InvalidSpec("gamma shape must be positive");
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        const double g = sample_gamma(shape + 1.0, stream);
        return g * std::pow(stream.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = stream.normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample(const InnovationSpec& spec, RngStream& stream) {
    spec.validate();
    switch (spec.family) {
        case InnovationFamily::Gaussian:
            return stream.normal();
        case InnovationFamily::StudentT:
            return student_draw(spec.dof, stream);
        case InnovationFamily::StandardizedStudentT:
            return student_draw(spec.dof, stream) / std::sqrt(spec.dof / (spec.dof - 2.0));
    }
    return std::numeric_limits<double>::quiet_NaN();
}

InnovationDensity::InnovationDensity(const InnovationSpec& spec) : family_(spec.family) {
    spec.validate();
    if (family_ == InnovationFamily::Gaussian) {
        log_norm_ = -0.5 * std::log(2.0 * std::numbers::pi);
        return;
    }
    dof_ = spec.dof;
    log_norm_ = student_log_norm(dof_);
    if (family_ == InnovationFamily::StandardizedStudentT) scale_ = std::sqrt(dof_ / (dof_ - 2.0));
}

double InnovationDensity::operator()(double x) const {
    if (family_ == InnovationFamily::Gaussian) return std::exp(log_norm_ - 0.5 * x * x);
    const double y = scale_ * x;
    return scale_ * std::exp(log_norm_ - 0.5 * (dof_ + 1.0) * std::log1p(y * y / dof_));
}

double density(const InnovationSpec& spec, double x) { return InnovationDensity(spec)(x); }

InnovationSpec parse_innovation(std::string_view text) {
    InnovationSpec spec;
    if (text == "gaussian" || text == "normal") {
        spec = InnovationSpec::gaussian();
    } else if (text.starts_with("std_t")) {
        auto rest = text.substr(5);
        if (rest.starts_with(':')) rest.remove_prefix(1);
        spec = InnovationSpec::standardized_t(parse_double(rest));
    } else if (text.starts_with("t")) {
        auto rest = text.substr(1);
        if (rest.starts_with(':')) rest.remove_prefix(1);
        spec = InnovationSpec::student_t(parse_double(rest));
    } else {
        throw InvalidSpec("unknown innovation law '" + std::string(text) +
                          "' (expected gaussian, t<dof>, std_t<dof>)");
    }
    spec.validate();
    return spec;
}

std::string to_string(const InnovationSpec& spec) {
    std::ostringstream out;
    switch (spec.family) {
        case InnovationFamily::Gaussian:
            return "gaussian";
        case InnovationFamily::StudentT:
            out << "t:" << spec.dof;
            return out.str();
        case InnovationFamily::StandardizedStudentT:
            out << "std_t:" << spec.dof;
            return out.str();
    }
    return "unknown";
}

}  // namespace mdens
