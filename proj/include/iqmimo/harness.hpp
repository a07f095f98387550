#pragma once

// Sweep harness: experiment configuration files, sweep execution over the
// Monte Carlo engine, and CSV/JSON result emission. The CLI entry point
// lives here too so the binary in tools/ stays a thin shell.

#include "iqmimo/montecarlo.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace iqmimo {

// Which template field a sweep varies.
enum class SweepParam {
    SnrDb,
    SirBothDb,
    SirCDb,
    SirCpDb,
    IrrDb,
    NInterferers,
    NRx,
    NUsers,
};

std::string to_string(SweepParam p);
std::string to_string(CombinerKind k);
std::string to_string(ImbalanceMode m);
std::string to_string(Metric m);

struct ExperimentConfig {
    ScenarioTemplate tmpl;
    SweepParam sweep = SweepParam::SnrDb;
    std::vector<double> sweep_values;
    std::vector<ImbalanceMode> modes{ImbalanceMode::TxRx};
    std::vector<CombinerKind> receivers{CombinerKind::Lmmse,
                                        CombinerKind::AugmentedLmmse};
    Metric metric = Metric::SinrDb;
    std::size_t trials = 200;
    std::size_t symbols_per_trial = 100;
    std::uint64_t seed = 1;
    unsigned threads = 0; // 0: pick at run time (env, then hardware)
    bool average_db_domain = false;
    double condition_limit = 1e12;

    bool operator==(const ExperimentConfig&) const = default;
};

// Thrown on malformed configuration text; what() carries file:line context.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat `key = value` format, one per line, '#' comments, case-sensitive
// keys. Unknown keys, duplicates, and unparsable values throw ConfigError
// with the offending line number. parse_config(print_config(c)) == c.
ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig parse_config_file(const std::string& path);
std::string print_config(const ExperimentConfig& cfg);

// One (sweep value, receiver, mode) cell of a finished sweep. mean/stderr
// are dB for the SINR metric and error probability for SER.
struct ResultRow {
    std::string sweep_param;
    double sweep_value = 0.0;
    std::string receiver;
    std::string mode;
    std::string metric;
    double mean = 0.0;
    double stderr_value = 0.0;
    std::size_t n_trials = 0;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    double elapsed_seconds = 0.0;
};

// Applies one sweep value to the template; validates integer-valued
// parameters (counts must be non-negative integers, n_rx and n_users >= 1).
ScenarioTemplate apply_sweep_value(const ScenarioTemplate& base, SweepParam p,
                                   double value);

// Runs the whole sweep. All sweep points share trial seeds (common random
// numbers), so curves over the sweep axis are paired point-to-point.
ResultTable run_sweep(const ExperimentConfig& cfg);

// Eight pinned columns: sweep_param, sweep_value, receiver, mode, metric,
// mean, stderr, n_trials. Header always present, values %.6g.
std::string to_csv(const ResultTable& table);
ResultTable parse_csv(const std::string& text);
// JSON object {"elapsed_seconds": ..., "rows": [...]}.
std::string to_json(const ResultTable& table);

// `iqmimo sweep|complexity|validate ...`. Returns the process exit code:
// 0 success, 2 malformed configuration, 1 anything else.
int run_cli(int argc, const char* const* argv);

} // namespace iqmimo
