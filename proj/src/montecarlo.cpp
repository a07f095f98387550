#include "iqmimo/montecarlo.hpp"

#include "iqmimo/signal.hpp"

#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace iqmimo {

std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                std::uint64_t sweep_index,
                                std::uint64_t trial_index) {
    std::uint64_t state = master_seed;
    std::uint64_t seed = rng::splitmix64_next(state);
    state = seed ^ (sweep_index + 0xD1B54A32D192ED03ULL);
    seed = rng::splitmix64_next(state);
    state = seed ^ (trial_index + 0x8BB84B93962EACC9ULL);
    return rng::splitmix64_next(state);
}

const CellResult& EvalResult::cell(ImbalanceMode mode,
                                   CombinerKind receiver) const {
    for (const CellResult& c : cells)
        if (c.mode == mode && c.receiver == receiver) return c;
    throw std::out_of_range("EvalResult: no such cell");
}

namespace {

// Everything one trial contributes, per cell. SINR values are linear.
struct TrialData {
    std::vector<std::vector<double>> sinr; // [cell][stream]
    std::vector<std::size_t> errors;       // [cell]
    std::size_t symbols_per_cell = 0;      // pooled over streams
};

std::uint64_t attempt_seed(const EvalRequest& req, std::size_t trial,
                           std::size_t attempt) {
    std::uint64_t seed =
        derive_trial_seed(req.master_seed, req.sweep_index, trial);
    if (attempt > 0) {
        std::uint64_t state =
            seed ^ (static_cast<std::uint64_t>(attempt) * 0x9E3779B97F4A7C15ULL);
        seed = rng::splitmix64_next(state);
    }
    return seed;
}

CombinerWeights weights_for(Workspace& ws, CombinerKind kind) {
    switch (kind) {
    case CombinerKind::Lmmse: return lmmse_weights(ws);
    case CombinerKind::AugmentedLmmse: return augmented_lmmse_weights(ws);
    case CombinerKind::Mrc: return mrc_weights(ws);
    }
    throw std::logic_error("unknown combiner kind");
}

// One attempt at one trial. Returns false when the trial must be redrawn
// because some requested solve is too ill-conditioned.
bool run_trial_attempt(const EvalRequest& req, std::uint64_t seed,
                       TrialData& out) {
    rng::Xoshiro256pp g(seed);

    // The full joint draw happens once; each cell's mode is a substitution,
    // so all modes share every random quantity.
    ScenarioTemplate full = req.tmpl;
    full.mode = ImbalanceMode::TxRx;
    const SubcarrierScenario base = draw_scenario(full, g);

    const std::size_t n_modes = req.modes.size();
    std::vector<SubcarrierScenario> scns;
    scns.reserve(n_modes);
    for (ImbalanceMode mode : req.modes)
        scns.push_back(apply_imbalance_mode(base, mode));

    std::vector<Workspace> wss;
    wss.reserve(n_modes);
    for (const SubcarrierScenario& scn : scns) wss.emplace_back(scn);

    bool need_lin = false, need_aug = false;
    for (CombinerKind k : req.receivers) {
        need_lin |= k == CombinerKind::Lmmse;
        need_aug |= k == CombinerKind::AugmentedLmmse;
    }
    const double rcond_floor = 1.0 / req.condition_limit;
    try {
        for (Workspace& ws : wss) {
            if (need_lin && ws.lin_solver().rcond() < rcond_floor)
                return false;
            if (need_aug && ws.aug_solver().rcond() < rcond_floor)
                return false;
        }
    } catch (const std::runtime_error&) {
        return false; // factorization failed outright: same treatment
    }

    const std::size_t n_cells = n_modes * req.receivers.size();
    const Eigen::Index n_streams = wss.front().n_streams();

    std::vector<std::vector<CombinerWeights>> weights(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m)
        for (CombinerKind k : req.receivers)
            weights[m].push_back(weights_for(wss[m], k));

    if (req.metric == Metric::SinrDb) {
        out.sinr.assign(n_cells, {});
        for (std::size_t m = 0; m < n_modes; ++m)
            for (std::size_t r = 0; r < req.receivers.size(); ++r) {
                auto& cell = out.sinr[m * req.receivers.size() + r];
                cell.reserve(static_cast<std::size_t>(n_streams));
                const CombinerWeights& w = weights[m][r];
                for (const StreamRef& s : w.streams) {
                    const PowerDecomposition d =
                        power_decomposition(wss[m], w, s.user, s.stream);
                    cell.push_back(d.p_signal / d.denominator());
                }
            }
        return true;
    }

    // SER: one symbol draw feeds every cell; detection is bias-corrected and
    // compared against the drawn constellation points, pooled over streams.
    out.errors.assign(n_cells, 0);
    std::vector<std::vector<CVec>> gains(n_modes);
    for (std::size_t m = 0; m < n_modes; ++m)
        for (std::size_t r = 0; r < req.receivers.size(); ++r)
            gains[m].push_back(combiner_bias_gains(wss[m], weights[m][r]));

    const double sqrt_power = std::sqrt(req.tmpl.stream_power());
    for (std::size_t k = 0; k < req.symbols_per_trial; ++k) {
        const SnapshotDraw draw =
            draw_snapshot_inputs(base, SymbolKind::Qam16, g);
        for (std::size_t m = 0; m < n_modes; ++m) {
            const Snapshot snap = assemble_snapshot(scns[m], draw);
            const AugmentedSnapshot aug = augment(snap);
            for (std::size_t r = 0; r < req.receivers.size(); ++r) {
                const CombinerWeights& w = weights[m][r];
                const CVec y = w.kind == CombinerKind::AugmentedLmmse
                                   ? combine(w, aug)
                                   : combine(w, snap);
                std::size_t& errs = out.errors[m * req.receivers.size() + r];
                for (std::size_t s = 0; s < w.streams.size(); ++s) {
                    const StreamRef& ref = w.streams[s];
                    const Complex corrected =
                        y[static_cast<Eigen::Index>(s)] / gains[m][r][s];
                    const Complex decided = slice_qam16(corrected / sqrt_power);
                    const Complex sent =
                        draw.x_c[ref.user][ref.stream] / sqrt_power;
                    if (std::abs(decided - sent) > 1e-6) ++errs;
                }
            }
        }
    }
    out.symbols_per_cell =
        req.symbols_per_trial * static_cast<std::size_t>(n_streams);
    return true;
}

TrialData run_trial(const EvalRequest& req, std::size_t trial,
                    std::size_t& rejects) {
    for (std::size_t attempt = 0; attempt < 64; ++attempt) {
        TrialData data;
        if (run_trial_attempt(req, attempt_seed(req, trial, attempt), data))
            return data;
        ++rejects;
    }
    throw std::runtime_error(
        "evaluate: trial rejected 64 times; scenario distribution is "
        "degenerate at the requested condition limit");
}

double to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace

EvalResult evaluate(const EvalRequest& req) {
    if (req.modes.empty() || req.receivers.empty())
        throw std::invalid_argument("evaluate: empty mode or receiver list");
    if (req.n_trials == 0)
        throw std::invalid_argument("evaluate: n_trials must be positive");
    if (req.metric == Metric::Ser && req.symbols_per_trial == 0)
        throw std::invalid_argument("evaluate: symbols_per_trial must be positive");

    const std::size_t n_cells = req.modes.size() * req.receivers.size();
    std::vector<TrialData> slots(req.n_trials);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> rejected{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= req.n_trials) return;
            try {
                std::size_t rejects = 0;
                slots[t] = run_trial(req, t, rejects);
                rejected.fetch_add(rejects);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    const unsigned n_threads = std::max(1u, req.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    // Ordered reduction over trials, so the result does not depend on the
    // completion order of the workers.
    EvalResult result;
    result.rejected_trials = rejected.load();
    result.cells.reserve(n_cells);
    const double t_count = static_cast<double>(req.n_trials);

    for (std::size_t m = 0; m < req.modes.size(); ++m)
        for (std::size_t r = 0; r < req.receivers.size(); ++r) {
            const std::size_t c = m * req.receivers.size() + r;
            CellResult cell;
            cell.mode = req.modes[m];
            cell.receiver = req.receivers[r];
            cell.metric = req.metric;
            cell.n_trials = req.n_trials;

            if (req.metric == Metric::SinrDb) {
                const std::size_t n_streams = slots.front().sinr[c].size();
                std::vector<double> acc(n_streams, 0.0);
                double sum = 0.0, sum_sq = 0.0;
                for (const TrialData& td : slots) {
                    double trial_mean = 0.0;
                    for (std::size_t s = 0; s < n_streams; ++s) {
                        const double v = req.average_db_domain
                                             ? to_db(td.sinr[c][s])
                                             : td.sinr[c][s];
                        acc[s] += v;
                        trial_mean += v;
                    }
                    trial_mean /= static_cast<double>(n_streams);
                    sum += trial_mean;
                    sum_sq += trial_mean * trial_mean;
                }
                const double mean = sum / t_count;
                double sd = 0.0;
                if (req.n_trials > 1) {
                    const double var =
                        std::max(0.0, (sum_sq - t_count * mean * mean) /
                                          (t_count - 1.0));
                    sd = std::sqrt(var / t_count);
                }
                cell.per_stream_sinr_db.resize(n_streams);
                for (std::size_t s = 0; s < n_streams; ++s) {
                    const double v = acc[s] / t_count;
                    cell.per_stream_sinr_db[s] =
                        req.average_db_domain ? v : to_db(v);
                }
                if (req.average_db_domain) {
                    cell.mean = mean;
                    cell.stderr_value = sd;
                } else {
                    cell.mean = to_db(mean);
                    // delta method through 10 log10(x)
                    cell.stderr_value = 10.0 / std::log(10.0) * sd / mean;
                }
            } else {
                std::size_t errs = 0, total = 0;
                double sum = 0.0, sum_sq = 0.0;
                for (const TrialData& td : slots) {
                    errs += td.errors[c];
                    total += td.symbols_per_cell;
                    const double p = static_cast<double>(td.errors[c]) /
                                     static_cast<double>(td.symbols_per_cell);
                    sum += p;
                    sum_sq += p * p;
                }
                cell.n_symbols = total;
                cell.mean = static_cast<double>(errs) /
                            static_cast<double>(total);
                if (req.n_trials > 1) {
                    const double mean_p = sum / t_count;
                    const double var =
                        std::max(0.0, (sum_sq - t_count * mean_p * mean_p) /
                                          (t_count - 1.0));
                    cell.stderr_value = std::sqrt(var / t_count);
                }
            }
            result.cells.push_back(std::move(cell));
        }
    return result;
}

SinrReport average_sinr(const ScenarioTemplate& tmpl, CombinerKind receiver,
                        std::size_t n_trials, std::uint64_t master_seed,
                        unsigned threads, bool db_domain) {
    EvalRequest req;
    req.tmpl = tmpl;
    req.modes = {tmpl.mode};
    req.receivers = {receiver};
    req.metric = Metric::SinrDb;
    req.n_trials = n_trials;
    req.master_seed = master_seed;
    req.threads = threads;
    req.average_db_domain = db_domain;
    const EvalResult res = evaluate(req);
    const CellResult& cell = res.cells.front();
    SinrReport report;
    report.per_stream_sinr_db = cell.per_stream_sinr_db;
    report.mean_sinr_db = cell.mean;
    report.stderr_db = cell.stderr_value;
    report.n_trials = cell.n_trials;
    report.rejected_trials = res.rejected_trials;
    return report;
}

std::vector<SerEstimate> ser_montecarlo(const ScenarioTemplate& tmpl,
                                        const std::vector<CombinerKind>& receivers,
                                        std::size_t n_trials,
                                        std::size_t symbols_per_trial,
                                        std::uint64_t master_seed,
                                        unsigned threads) {
    EvalRequest req;
    req.tmpl = tmpl;
    req.modes = {tmpl.mode};
    req.receivers = receivers;
    req.metric = Metric::Ser;
    req.n_trials = n_trials;
    req.symbols_per_trial = symbols_per_trial;
    req.master_seed = master_seed;
    req.threads = threads;
    const EvalResult res = evaluate(req);
    std::vector<SerEstimate> out;
    out.reserve(receivers.size());
    for (const CellResult& cell : res.cells) {
        SerEstimate e;
        e.ser = cell.mean;
        e.stderr_value = cell.stderr_value;
        e.n_symbols = cell.n_symbols;
        e.n_trials = cell.n_trials;
        out.push_back(e);
    }
    return out;
}

} // namespace iqmimo
