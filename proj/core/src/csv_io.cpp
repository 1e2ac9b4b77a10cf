#include "mdens/csv_io.hpp"

#include "mdens/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mdens {
namespace {

void write_comment(std::ostream& out, std::string_view comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_field(std::string_view field, std::size_t line_no, std::string_view column) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end) {
        std::ostringstream msg;
        msg << "line " << line_no << ", column '" << column << "': cannot parse '" << field
            << "' as a number";
        throw DataFormatError(msg.str());
    }
    return value;
}

}  // namespace

SeriesSample SeriesTable::to_sample() const {
    if (!has_truth()) {
        throw InvalidParameter("series has no true-path columns (m, sigma, eps)");
    }
    SeriesSample s;
    s.x = x;
    s.true_mean = *mean;
    s.true_vol = *vol;
    s.true_innov = *innov;
    return s;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_series_csv(std::ostream& out, const SeriesSample& s, bool keep_truth,
                      std::string_view comment) {
    write_comment(out, comment);
    out << (keep_truth ? "x,m,sigma,eps\n" : "x\n");
    for (std::size_t t = 0; t < s.x.size(); ++t) {
        out << format_double(s.x[t]);
        if (keep_truth) {
            out << ',' << format_double(s.true_mean[t]) << ',' << format_double(s.true_vol[t]) << ','
                << format_double(s.true_innov[t]);
        }
        out << '\n';
    }
}

void write_series_csv(std::ostream& out, std::span<const double> x, std::string_view comment) {
    write_comment(out, comment);
    out << "x\n";
    for (double v : x) out << format_double(v) << '\n';
}

SeriesTable read_series_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        for (auto f : split(t)) header.emplace_back(f);
        break;
    }
    if (header.empty()) throw DataFormatError("series file has no header line");

    int ix = -1, im = -1, is = -1, ie = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto& h = header[c];
        const int col = static_cast<int>(c);
        if (h == "x") ix = col;
        else if (h == "m") im = col;
        else if (h == "sigma") is = col;
        else if (h == "eps") ie = col;
    }
    if (ix < 0) {
        throw DataFormatError("line " + std::to_string(line_no) + ": header has no 'x' column");
    }

    SeriesTable table;
    std::vector<double> m, s, e;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split(t);
        if (fields.size() != header.size()) {
            throw DataFormatError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        table.x.push_back(parse_field(fields[static_cast<std::size_t>(ix)], line_no, "x"));
        if (im >= 0) m.push_back(parse_field(fields[static_cast<std::size_t>(im)], line_no, "m"));
        if (is >= 0) s.push_back(parse_field(fields[static_cast<std::size_t>(is)], line_no, "sigma"));
        if (ie >= 0) e.push_back(parse_field(fields[static_cast<std::size_t>(ie)], line_no, "eps"));
    }
    if (im >= 0) table.mean = std::move(m);
    if (is >= 0) table.vol = std::move(s);
    if (ie >= 0) table.innov = std::move(e);
    return table;
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_series_csv(in);
}

void write_estimate_csv(std::ostream& out, const DensityEstimate& e, std::string_view comment) {
    write_comment(out, comment);
    for (const auto& note : e.notes) out << "# note: " << note << '\n';
    out << "v,value,estimator_tag,bandwidth,n\n";
    const auto tag = to_string(e.tag);
    for (std::size_t g = 0; g < e.grid.size(); ++g) {
        out << format_double(e.grid[g]) << ',' << format_double(e.values[g]) << ',' << tag << ','
            << format_double(e.bandwidth) << ',' << e.n << '\n';
    }
}

void write_report_csv(std::ostream& out, const McReport& r, std::string_view comment) {
    write_comment(out, comment);
    for (const auto& note : r.notes) out << "# note: " << note << '\n';
    out << "setup,n,v,f_true,rmse_pr,rmse_res,bandwidth_rule,kappa,reps,excluded,seed\n";
    const auto& c = r.config;
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
        out << to_string(c.setup) << ',' << c.n << ',' << format_double(c.grid[g]) << ','
            << format_double(r.truth[g]) << ',' << format_double(r.rmse_pr[g]) << ','
            << format_double(r.rmse_res[g]) << ',' << to_string(c.rule.selector) << ','
            << format_double(c.rule.kappa) << ',' << c.reps << ',' << r.excluded << ',' << c.seed
            << '\n';
    }
}

void write_plot_data(std::ostream& out, const McReport& r, std::string_view comment) {
    write_comment(out, comment);
    out << "# v nrmse_parzen_rosenblatt nrmse_residual\n";
    for (std::size_t g = 0; g < r.config.grid.size(); ++g) {
        out << format_double(r.config.grid[g]) << ' ' << format_double(r.rmse_pr[g]) << ' '
            << format_double(r.rmse_res[g]) << '\n';
    }
}

void write_rate_csv(std::ostream& out, const RateReport& r, std::string_view comment) {
    write_comment(out, comment);
    for (const auto& note : r.notes) out << "# note: " << note << '\n';
    out << "# slope_pr=" << format_double(r.fit_pr.slope) << " se=" << format_double(r.fit_pr.slope_se)
        << '\n';
    out << "# slope_res=" << format_double(r.fit_res.slope)
        << " se=" << format_double(r.fit_res.slope_se) << '\n';
    out << "setup,v,n,rmse_pr,rmse_res,excluded,reps,bandwidth_rule,kappa,seed\n";
    const auto& c = r.config;
    for (std::size_t k = 0; k < r.n_values.size(); ++k) {
        out << to_string(c.setup) << ',' << format_double(c.v) << ',' << r.n_values[k] << ','
            << format_double(r.rmse_pr[k]) << ',' << format_double(r.rmse_res[k]) << ','
            << r.excluded[k] << ',' << c.reps << ',' << to_string(c.rule.selector) << ','
            << format_double(c.rule.kappa) << ',' << c.seed << '\n';
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << contents;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace mdens
