#pragma once

// Paired Monte Carlo evaluation. One evaluation runs a grid of cells
// (imbalance mode x receiver) over a common sequence of random trials: every
// cell of a trial sees the same channels, imbalance parameters, symbols and
// noise, so cross-cell differences carry no Monte Carlo noise from mismatched
// randomness. Trial t is seeded by derive_trial_seed(master_seed, sweep_index,
// t) alone, which makes results independent of the thread count.

#include "iqmimo/analysis.hpp"
#include "iqmimo/combiners.hpp"
#include "iqmimo/scenario.hpp"

#include <cstdint>
#include <vector>

namespace iqmimo {

// Deterministic per-trial seed: master -> sweep -> trial, each stage one
// SplitMix64 step on the previous output xored with the offset index.
std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                std::uint64_t sweep_index,
                                std::uint64_t trial_index);

enum class Metric { SinrDb, Ser };

struct EvalRequest {
    ScenarioTemplate tmpl;
    std::vector<ImbalanceMode> modes{ImbalanceMode::TxRx};
    std::vector<CombinerKind> receivers{CombinerKind::AugmentedLmmse};
    Metric metric = Metric::SinrDb;
    std::size_t n_trials = 100;
    std::size_t symbols_per_trial = 100; // Ser only
    std::uint64_t master_seed = 1;
    std::uint64_t sweep_index = 0;
    unsigned threads = 1;
    // Average SINR in the dB domain instead of the linear power domain.
    bool average_db_domain = false;
    // Trials whose covariance condition estimate exceeds this are redrawn
    // (counted in rejected_trials); keeps near-singular fades from dominating.
    double condition_limit = 1e12;
};

struct CellResult {
    ImbalanceMode mode = ImbalanceMode::TxRx;
    CombinerKind receiver = CombinerKind::AugmentedLmmse;
    Metric metric = Metric::SinrDb;
    double mean = 0.0;         // dB for SinrDb, error probability for Ser
    double stderr_value = 0.0; // same units as mean
    std::vector<double> per_stream_sinr_db; // SinrDb only
    std::size_t n_trials = 0;
    std::size_t n_symbols = 0; // Ser only, pooled over streams
};

struct EvalResult {
    std::vector<CellResult> cells; // mode-major, receiver-minor
    std::size_t rejected_trials = 0;

    const CellResult& cell(ImbalanceMode mode, CombinerKind receiver) const;
};

EvalResult evaluate(const EvalRequest& req);

} // namespace iqmimo
