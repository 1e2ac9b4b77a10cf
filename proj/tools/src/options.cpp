#include "mdens_cli/cli.hpp"

#include "mdens/error.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <thread>

#ifndef MDENS_VERSION
#define MDENS_VERSION "0.0.0"
#endif

namespace mdens::cli {
namespace {

double parse_plain(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw InvalidParameter("cannot parse '" + std::string(text) + "' as a number");
    }
    return v;
}

}  // namespace

double parse_real(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_plain(text);
    const double num = parse_plain(text.substr(0, slash));
    const double den = parse_plain(text.substr(slash + 1));
    if (den == 0.0) throw InvalidParameter("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

std::vector<double> parse_grid(std::string_view text) {
    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        if (b == std::string_view::npos) {
            throw InvalidParameter("grid '" + std::string(text) + "' must be lo:hi:points");
        }
        const double lo = parse_real(text.substr(0, a));
        const double hi = parse_real(text.substr(a + 1, b - a - 1));
        const double pts = parse_plain(text.substr(b + 1));
        if (pts < 1 || pts != static_cast<double>(static_cast<std::size_t>(pts))) {
            throw InvalidParameter("grid point count must be a positive integer");
        }
        const auto count = static_cast<std::size_t>(pts);
        if (count == 1) return {lo};
        for (std::size_t i = 0; i < count; ++i) {
            grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
        return grid;
    }
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        grid.push_back(parse_real(text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return grid;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

unsigned default_threads() {
    if (const char* env = std::getenv("MDENS_THREADS")) {
        unsigned v = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string version() { return MDENS_VERSION; }

std::string header_comment(std::string_view canonical) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return "mdens " + version() + " config=" + hex + " " + std::string(canonical);
}

}  // namespace mdens::cli
