#pragma once

#include "mdens/density.hpp"
#include "mdens/models.hpp"
#include "mdens/montecarlo.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdens {

// Every writer takes an optional comment emitted first as "# <comment>".
// Readers skip lines starting with '#'.

/// Columns of a series file: x, and optionally m, sigma, eps (true paths).
struct SeriesTable {
    std::vector<double> x;
    std::optional<std::vector<double>> mean;
    std::optional<std::vector<double>> vol;
    std::optional<std::vector<double>> innov;

    [[nodiscard]] bool has_truth() const { return mean && vol && innov; }
    /// SeriesSample carrying the true paths; theta and spec are left default.
    /// Throws InvalidParameter when the truth columns are missing.
    [[nodiscard]] SeriesSample to_sample() const;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_series_csv(std::ostream& out, const SeriesSample& s, bool keep_truth,
                      std::string_view comment = {});
void write_series_csv(std::ostream& out, std::span<const double> x, std::string_view comment = {});

/// Throws DataFormatError with the offending line number.
SeriesTable read_series_csv(std::istream& in);
/// Throws IoError if the file cannot be opened.
SeriesTable read_series_csv(const std::filesystem::path& path);

/// Columns: v, value, estimator_tag, bandwidth, n.
void write_estimate_csv(std::ostream& out, const DensityEstimate& e, std::string_view comment = {});

/// Columns: setup, n, v, f_true, rmse_pr, rmse_res, bandwidth_rule, kappa, reps, excluded, seed.
void write_report_csv(std::ostream& out, const McReport& r, std::string_view comment = {});

/// Whitespace-separated "v nrmse_pr nrmse_res" rows for gnuplot-style tools.
void write_plot_data(std::ostream& out, const McReport& r, std::string_view comment = {});

/// Columns: setup, v, n, rmse_pr, rmse_res, excluded, reps, bandwidth_rule, kappa, seed;
/// the fitted slopes are written as comment lines above the header.
void write_rate_csv(std::ostream& out, const RateReport& r, std::string_view comment = {});

/// Writes to `path` through a temporary stream; throws IoError on failure.
template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::string buffer = writer();
    write_text_file(path, buffer);
}

}  // namespace mdens
