#pragma once

// Closed-form real-flop models for the receiver processing chain: split-radix
// FFT, LMS/RLS weight adaptation, and linear combining, plus the ratio of the
// full augmented (mirror-subcarrier) chain to the plain per-subcarrier chain.
// Complex multiplies/adds are already expanded to real flops inside the
// printed formulas; these functions only evaluate them.

#include <cstddef>
#include <string>
#include <vector>

namespace iqmimo::complexity {

enum class AdaptAlgo { Lms, Rls };
enum class Processing { Linear, Augmented }; // N_in = N vs N_in = 2N

struct FlopModelInputs {
    std::size_t fft_size = 64; // C, power of two
    std::size_t n_rx = 1;      // N receive branches
    std::size_t n_streams = 1; // S data streams
    AdaptAlgo algo = AdaptAlgo::Lms;
    Processing processing = Processing::Linear;
};

// Split-radix FFT real-flop count for a power-of-two size C >= 2.
// Evaluated over a common denominator of 27 so integer-valued results
// (e.g. 1152 at C = 64) come out exact in double precision.
double fft_flops(std::size_t c);

// Per-subcarrier adaptation and combining costs as functions of the number of
// parallel input samples N_in.
double lms_flops(std::size_t n_in);
double rls_flops(std::size_t n_in);
double combining_flops(std::size_t n_in);

// Full per-subcarrier chain cost for one processing flavor:
//   N * fft_flops(C)/C + S * (algo_flops(N_in) + combining_flops(N_in)).
// One FFT per receive branch serves all subcarriers, so its cost enters as a
// per-subcarrier share; the same share appears in both chain flavors.
double chain_flops(const FlopModelInputs& in);

// Augmented-over-linear chain cost ratio; the processing field is ignored.
double chain_ratio(FlopModelInputs in);

// Ratio table over the standard grid: rows (N, S), columns C, one matrix per
// adaptation algorithm.
struct RatioTable {
    std::vector<std::pair<std::size_t, std::size_t>> row_sizes; // (N, S)
    std::vector<std::size_t> fft_sizes;                         // C
    std::vector<std::vector<double>> lms;                       // [row][col]
    std::vector<std::vector<double>> rls;
};

RatioTable ratio_table();

std::string format_ratio_table(const RatioTable& t); // aligned text
std::string ratio_table_csv(const RatioTable& t);

} // namespace iqmimo::complexity
