#pragma once

#include "mdens/rng.hpp"

#include <string>
#include <string_view>

namespace mdens {

enum class InnovationFamily { Gaussian, StudentT, StandardizedStudentT };

/// Law of the i.i.d. noise driving a location-scale model.
struct InnovationSpec {
    InnovationFamily family = InnovationFamily::Gaussian;
    double dof = 0.0;  // Student families only

    static InnovationSpec gaussian() { return {InnovationFamily::Gaussian, 0.0}; }
    static InnovationSpec student_t(double dof) { return {InnovationFamily::StudentT, dof}; }
    static InnovationSpec standardized_t(double dof) {
        return {InnovationFamily::StandardizedStudentT, dof};
    }

    /// Throws InvalidSpec. StudentT needs dof > 0, StandardizedStudentT dof > 2.
    void validate() const;

    /// Var(eps); +inf for StudentT with dof <= 2.
    [[nodiscard]] double variance() const;

    bool operator==(const InnovationSpec&) const = default;
};

/// One draw. StandardizedStudentT returns T / sqrt(dof / (dof - 2)).
double sample(const InnovationSpec& spec, RngStream& stream);

/// f_eps with the normalizing constants computed once.
class InnovationDensity {
public:
    explicit InnovationDensity(const InnovationSpec& spec);
    double operator()(double x) const;

private:
    InnovationFamily family_;
    double dof_ = 0.0;
    double scale_ = 1.0;     // c for the standardized law
    double log_norm_ = 0.0;
};

/// Density f_eps(x). For the standardized law, c * f_T(c * x) with c = sqrt(dof / (dof - 2)).
double density(const InnovationSpec& spec, double x);

/// Gamma(shape, 1) variate by Marsaglia-Tsang; shape > 0.
double sample_gamma(double shape, RngStream& stream);

/// Parses "gaussian", "t5", "t:<dof>", "std_t5", "std_t:<dof>".
InnovationSpec parse_innovation(std::string_view text);
std::string to_string(const InnovationSpec& spec);

}  // namespace mdens
