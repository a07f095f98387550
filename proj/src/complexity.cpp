#include "iqmimo/complexity.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace iqmimo::complexity {

namespace {

int log2_exact(std::size_t c) {
    if (c < 2 || !std::has_single_bit(c))
        throw std::invalid_argument("fft size must be a power of two >= 2");
    return std::countr_zero(c);
}

const char* algo_name(AdaptAlgo a) { return a == AdaptAlgo::Lms ? "LMS" : "RLS"; }

} // namespace

double fft_flops(std::size_t c) {
    const int lg = log2_exact(c);
    const double cc = static_cast<double>(c);
    const double lgc = static_cast<double>(lg);
    const double sign = (lg % 2 == 0) ? 1.0 : -1.0;
    // (34/9)C lgC - (124/27)C - 2 lgC - (2/9)(-1)^lgC lgC + (16/27)(-1)^lgC + 8,
    // assembled over denominator 27 so integer results are exact.
    const double numerator = 102.0 * cc * lgc - 124.0 * cc - 54.0 * lgc -
                             6.0 * sign * lgc + 16.0 * sign + 216.0;
    return numerator / 27.0;
}

double lms_flops(std::size_t n_in) {
    return 16.0 * static_cast<double>(n_in) + 6.0;
}

double rls_flops(std::size_t n_in) {
    const double n = static_cast<double>(n_in);
    return 32.0 * n * n + 20.0 * n;
}

double combining_flops(std::size_t n_in) {
    return 8.0 * static_cast<double>(n_in) - 2.0;
}

double chain_flops(const FlopModelInputs& in) {
    const std::size_t n_in =
        in.processing == Processing::Augmented ? 2 * in.n_rx : in.n_rx;
    const double adapt =
        in.algo == AdaptAlgo::Lms ? lms_flops(n_in) : rls_flops(n_in);
    const double fft_share =
        static_cast<double>(in.n_rx) * fft_flops(in.fft_size) /
        static_cast<double>(in.fft_size);
    return fft_share +
           static_cast<double>(in.n_streams) * (adapt + combining_flops(n_in));
}

double chain_ratio(FlopModelInputs in) {
    in.processing = Processing::Augmented;
    const double augmented = chain_flops(in);
    in.processing = Processing::Linear;
    const double linear = chain_flops(in);
    return augmented / linear;
}

RatioTable ratio_table() {
    RatioTable t;
    t.row_sizes = {{1, 1}, {10, 5}, {20, 10}, {100, 50}};
    t.fft_sizes = {64, 256, 1024, 2048, 8192};
    for (AdaptAlgo algo : {AdaptAlgo::Lms, AdaptAlgo::Rls}) {
        auto& out = algo == AdaptAlgo::Lms ? t.lms : t.rls;
        for (auto [n, s] : t.row_sizes) {
            std::vector<double> row;
            row.reserve(t.fft_sizes.size());
            for (std::size_t c : t.fft_sizes)
                row.push_back(chain_ratio({c, n, s, algo, Processing::Linear}));
            out.push_back(std::move(row));
        }
    }
    return t;
}

std::string format_ratio_table(const RatioTable& t) {
    std::string out;
    char buf[128];
    for (AdaptAlgo algo : {AdaptAlgo::Lms, AdaptAlgo::Rls}) {
        const auto& mat = algo == AdaptAlgo::Lms ? t.lms : t.rls;
        std::snprintf(buf, sizeof buf,
                      "Augmented/linear complexity ratio, %s adaptation\n",
                      algo_name(algo));
        out += buf;
        std::snprintf(buf, sizeof buf, "%12s", "(N, S) \\ C");
        out += buf;
        for (std::size_t c : t.fft_sizes) {
            std::snprintf(buf, sizeof buf, "%8zu", c);
            out += buf;
        }
        out += '\n';
        for (std::size_t r = 0; r < t.row_sizes.size(); ++r) {
            std::snprintf(buf, sizeof buf, "  (%3zu,%3zu) ", t.row_sizes[r].first,
                          t.row_sizes[r].second);
            out += buf;
            for (double v : mat[r]) {
                std::snprintf(buf, sizeof buf, "%8.2f", v);
                out += buf;
            }
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

std::string ratio_table_csv(const RatioTable& t) {
    std::string out = "algo,n_rx,n_streams,fft_size,ratio\n";
    char buf[128];
    for (AdaptAlgo algo : {AdaptAlgo::Lms, AdaptAlgo::Rls}) {
        const auto& mat = algo == AdaptAlgo::Lms ? t.lms : t.rls;
        for (std::size_t r = 0; r < t.row_sizes.size(); ++r)
            for (std::size_t j = 0; j < t.fft_sizes.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.6g\n",
                              algo_name(algo), t.row_sizes[r].first,
                              t.row_sizes[r].second, t.fft_sizes[j], mat[r][j]);
                out += buf;
            }
    }
    return out;
}

} // namespace iqmimo::complexity
