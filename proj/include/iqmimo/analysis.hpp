#pragma once

// Analytic per-stream output power decomposition and SINR, scenario
// templates for randomized trials, and the Monte Carlo SINR/SER entry
// points.

#include "iqmimo/combiners.hpp"
#include "iqmimo/rng.hpp"
#include "iqmimo/scenario.hpp"
#include "iqmimo/workspace.hpp"

#include <cstdint>
#include <vector>

namespace iqmimo {

// Diagonal 0/1 selector of one stream and its complement; gamma + delta = I.
struct StreamSelector {
    RVec gamma;
    RVec delta;

    static StreamSelector for_stream(Eigen::Index stream,
                                     Eigen::Index n_streams);
};

// The six components of one stream's combiner output power w^H R w:
// desired signal, inter-stream interference of the same user, inter-user
// interference from the other users on c, conjugate leakage of the users on
// c', and the two interference-plus-noise images. All linear scale.
struct PowerDecomposition {
    double p_signal = 0.0;
    double p_isi = 0.0;
    double p_iui_c = 0.0;
    double p_iui_cp = 0.0;
    double p_z_c = 0.0;
    double p_z_cp = 0.0;

    double total() const {
        return p_signal + p_isi + p_iui_c + p_iui_cp + p_z_c + p_z_cp;
    }
    double denominator() const { return total() - p_signal; }
};

// Weights of kind AugmentedLmmse are expanded against the augmented
// quantities; linear-space kinds (Lmmse, Mrc) against their linear
// counterparts. Every term is a quadratic form in w, so the six terms sum to
// w^H R w exactly (up to rounding) for arbitrary weights.
PowerDecomposition power_decomposition(Workspace& ws,
                                       const CombinerWeights& weights,
                                       std::size_t user, Eigen::Index stream);
PowerDecomposition power_decomposition(const SubcarrierScenario& scn,
                                       const CombinerWeights& weights,
                                       std::size_t user, Eigen::Index stream);

// 10 log10(p_signal / (p_isi + p_iui_c + p_iui_cp + p_z_c + p_z_cp)).
double sinr_db(const PowerDecomposition& d);

// Distribution of random scenarios for Monte Carlo trials. Two factory
// presets cover the standard multi-user configuration (N=20, U=V=5, M=Q=2,
// L=8, SNR 20 dB, SIR -20 dB, IRR floor 25 dB) and the large-array
// configuration (N=100, U=5, M=Q=1, L=0, SNR 20 dB, IRR pinned at 20 dB,
// same devices on both subcarriers).
enum class ChannelDist { Rayleigh, FixedUnit };

struct ScenarioTemplate {
    Eigen::Index n_rx = 20;
    std::size_t n_users_c = 5;
    std::size_t n_users_cp = 5;
    Eigen::Index m_tx = 2;
    Eigen::Index q_streams = 2;
    std::size_t n_interferers = 8;        // per subcarrier
    Eigen::Index interferer_antennas = 1; // J, same for every interferer
    double snr_db = 20.0;
    double sir_c_db = -20.0;
    double sir_cp_db = -20.0;
    double irr_bound_db = 25.0; // floor, or exact value when fixed_irr
    bool fixed_irr = false;
    bool mirror_aliasing = false;
    ImbalanceMode mode = ImbalanceMode::TxRx;
    ChannelDist channels = ChannelDist::Rayleigh;
    double noise_power = 1.0;

    // Per-branch SNR with unit-variance channel entries: the total received
    // stream power of one user per RX branch over the noise power.
    double stream_power() const;
    // Equal split of the interference budget across all interferer antennas
    // on one subcarrier.
    double interferer_power(double sir_db) const;

    bool operator==(const ScenarioTemplate&) const = default;
};

ScenarioTemplate basic_defaults();
ScenarioTemplate massive_mimo_defaults();

// Draws one scenario. The draw order is pinned and independent of the
// imbalance mode: users_c (channel at c, channel at c', TX branches at c, at
// c'; user by user), then users_cp (skipped entirely under mirror aliasing,
// where the entries are copies of users_c with the same hardware), then
// interferers_c, interferers_cp, RX branches at c, at c'. The full joint
// TX+RX imbalance is always drawn; the template's mode is applied as a
// substitution afterwards, so paired trials across modes see identical
// randomness.
SubcarrierScenario draw_scenario(const ScenarioTemplate& tmpl,
                                 rng::Xoshiro256pp& g);

struct SinrReport {
    std::vector<double> per_stream_sinr_db; // averaged over trials
    double mean_sinr_db = 0.0;
    double stderr_db = 0.0;
    std::size_t n_trials = 0;
    std::size_t rejected_trials = 0;
};

// Monte Carlo average SINR of one receiver on the template's scenario
// distribution; trial t uses the deterministic seed
// derive_trial_seed(master_seed, 0, t). Averaging is in the linear power
// domain unless db_domain is set.
SinrReport average_sinr(const ScenarioTemplate& tmpl, CombinerKind receiver,
                        std::size_t n_trials, std::uint64_t master_seed,
                        unsigned threads = 1, bool db_domain = false);

struct SerEstimate {
    double ser = 0.0;
    double stderr_value = 0.0;
    std::size_t n_symbols = 0;
    std::size_t n_trials = 0;
};

// Uncoded 16-QAM symbol error rate per receiver kind, pooled over all
// streams of users_c. Outputs are bias-corrected by each stream's combiner
// gain before minimum-distance detection. All receivers see identical
// channel, imbalance, symbol and noise realizations.
std::vector<SerEstimate> ser_montecarlo(const ScenarioTemplate& tmpl,
                                        const std::vector<CombinerKind>& receivers,
                                        std::size_t n_trials,
                                        std::size_t symbols_per_trial,
                                        std::uint64_t master_seed,
                                        unsigned threads = 1);

} // namespace iqmimo
