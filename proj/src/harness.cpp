#include "iqmimo/harness.hpp"

#include "iqmimo/complexity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string_view>
#include <thread>

namespace iqmimo {

std::string to_string(SweepParam p) {
    switch (p) {
    case SweepParam::SnrDb: return "snr_db";
    case SweepParam::SirBothDb: return "sir_both_db";
    case SweepParam::SirCDb: return "sir_c_db";
    case SweepParam::SirCpDb: return "sir_cp_db";
    case SweepParam::IrrDb: return "irr_db";
    case SweepParam::NInterferers: return "n_interferers";
    case SweepParam::NRx: return "n_rx";
    case SweepParam::NUsers: return "n_users";
    }
    throw std::logic_error("unknown sweep parameter");
}

std::string to_string(CombinerKind k) {
    switch (k) {
    case CombinerKind::Lmmse: return "lmmse";
    case CombinerKind::AugmentedLmmse: return "augmented_lmmse";
    case CombinerKind::Mrc: return "mrc";
    }
    throw std::logic_error("unknown combiner kind");
}

std::string to_string(ImbalanceMode m) {
    switch (m) {
    case ImbalanceMode::None: return "none";
    case ImbalanceMode::TxOnly: return "tx_only";
    case ImbalanceMode::RxOnly: return "rx_only";
    case ImbalanceMode::TxRx: return "tx_rx";
    }
    throw std::logic_error("unknown imbalance mode");
}

std::string to_string(Metric m) {
    switch (m) {
    case Metric::SinrDb: return "sinr";
    case Metric::Ser: return "ser";
    }
    throw std::logic_error("unknown metric");
}

namespace {

std::string trim(std::string_view s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string_view::npos) return {};
    const auto to = s.find_last_not_of(" \t\r");
    return std::string(s.substr(from, to - from + 1));
}

[[noreturn]] void fail_at(const std::string& source, int line,
                          const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

template <typename T>
T parse_number(const std::string& text, const std::string& source, int line,
               const std::string& key) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        fail_at(source, line, "cannot parse value '" + text + "' for " + key);
    return value;
}

bool parse_bool(const std::string& text, const std::string& source, int line,
                const std::string& key) {
    if (text == "true") return true;
    if (text == "false") return false;
    fail_at(source, line, key + " must be 'true' or 'false', got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text,
                                    const std::string& source, int line,
                                    const std::string& key) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string item = trim(std::string_view(text).substr(
            start, comma == std::string::npos ? std::string::npos
                                              : comma - start));
        if (item.empty())
            fail_at(source, line, key + " has an empty list element");
        items.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return items;
}

SweepParam parse_sweep_param(const std::string& s, const std::string& source,
                             int line) {
    for (SweepParam p :
         {SweepParam::SnrDb, SweepParam::SirBothDb, SweepParam::SirCDb,
          SweepParam::SirCpDb, SweepParam::IrrDb, SweepParam::NInterferers,
          SweepParam::NRx, SweepParam::NUsers})
        if (to_string(p) == s) return p;
    fail_at(source, line, "unknown sweep parameter '" + s + "'");
}

CombinerKind parse_receiver(const std::string& s, const std::string& source,
                            int line) {
    for (CombinerKind k : {CombinerKind::Lmmse, CombinerKind::AugmentedLmmse,
                           CombinerKind::Mrc})
        if (to_string(k) == s) return k;
    fail_at(source, line, "unknown receiver '" + s + "'");
}

ImbalanceMode parse_mode(const std::string& s, const std::string& source,
                         int line) {
    for (ImbalanceMode m : {ImbalanceMode::None, ImbalanceMode::TxOnly,
                            ImbalanceMode::RxOnly, ImbalanceMode::TxRx})
        if (to_string(m) == s) return m;
    fail_at(source, line, "unknown imbalance mode '" + s + "'");
}

Metric parse_metric(const std::string& s, const std::string& source, int line) {
    if (s == "sinr") return Metric::SinrDb;
    if (s == "ser") return Metric::Ser;
    fail_at(source, line, "unknown metric '" + s + "'");
}

ChannelDist parse_channels(const std::string& s, const std::string& source,
                           int line) {
    if (s == "rayleigh") return ChannelDist::Rayleigh;
    if (s == "fixed_unit") return ChannelDist::FixedUnit;
    fail_at(source, line, "unknown channel distribution '" + s + "'");
}

std::string channels_name(ChannelDist d) {
    return d == ChannelDist::Rayleigh ? "rayleigh" : "fixed_unit";
}

// Shortest representation that parses back to the same double.
std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string fmt_g6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void check_config(const ExperimentConfig& cfg, const std::string& source) {
    auto fail = [&](const std::string& msg) {
        throw ConfigError(source + ": " + msg);
    };
    if (cfg.sweep_values.empty()) fail("sweep_values is empty");
    if (cfg.receivers.empty()) fail("receivers is empty");
    if (cfg.modes.empty()) fail("modes is empty");
    if (cfg.trials == 0) fail("trials must be positive");
    if (cfg.metric == Metric::Ser && cfg.symbols_per_trial == 0)
        fail("symbols_per_trial must be positive for the ser metric");
    if (cfg.condition_limit <= 1.0) fail("condition_limit must exceed 1");
    const ScenarioTemplate& t = cfg.tmpl;
    if (t.n_rx < 1) fail("n_rx must be at least 1");
    if (t.n_users_c < 1) fail("n_users_c must be at least 1");
    if (t.q_streams < 1) fail("q_streams must be at least 1");
    if (t.m_tx < t.q_streams) fail("m_tx must be at least q_streams");
    if (t.interferer_antennas < 1) fail("interferer_antennas must be at least 1");
    if (t.irr_bound_db <= 0.0) fail("irr_db must be positive");
    if (t.noise_power <= 0.0) fail("noise_power must be positive");
    if (t.mirror_aliasing && t.n_users_cp != t.n_users_c)
        fail("mirror_aliasing requires n_users_cp == n_users_c");
}

} // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail_at(source, line, "expected 'key = value'");
        const std::string key = trim(std::string_view(stripped).substr(0, eq));
        const std::string value =
            trim(std::string_view(stripped).substr(eq + 1));
        if (key.empty()) fail_at(source, line, "empty key");
        if (value.empty()) fail_at(source, line, "empty value for " + key);
        if (!seen.insert(key).second)
            fail_at(source, line, "duplicate key '" + key + "'");

        ScenarioTemplate& t = cfg.tmpl;
        if (key == "metric") {
            cfg.metric = parse_metric(value, source, line);
        } else if (key == "sweep") {
            cfg.sweep = parse_sweep_param(value, source, line);
        } else if (key == "sweep_values") {
            cfg.sweep_values.clear();
            for (const std::string& item : split_list(value, source, line, key))
                cfg.sweep_values.push_back(
                    parse_number<double>(item, source, line, key));
        } else if (key == "receivers") {
            cfg.receivers.clear();
            for (const std::string& item : split_list(value, source, line, key))
                cfg.receivers.push_back(parse_receiver(item, source, line));
        } else if (key == "modes") {
            cfg.modes.clear();
            for (const std::string& item : split_list(value, source, line, key))
                cfg.modes.push_back(parse_mode(item, source, line));
        } else if (key == "trials") {
            cfg.trials = parse_number<std::size_t>(value, source, line, key);
        } else if (key == "symbols_per_trial") {
            cfg.symbols_per_trial =
                parse_number<std::size_t>(value, source, line, key);
        } else if (key == "seed") {
            cfg.seed = parse_number<std::uint64_t>(value, source, line, key);
        } else if (key == "threads") {
            cfg.threads = parse_number<unsigned>(value, source, line, key);
        } else if (key == "average_db_domain") {
            cfg.average_db_domain = parse_bool(value, source, line, key);
        } else if (key == "condition_limit") {
            cfg.condition_limit =
                parse_number<double>(value, source, line, key);
        } else if (key == "n_rx") {
            t.n_rx = parse_number<Eigen::Index>(value, source, line, key);
        } else if (key == "n_users_c") {
            t.n_users_c = parse_number<std::size_t>(value, source, line, key);
        } else if (key == "n_users_cp") {
            t.n_users_cp = parse_number<std::size_t>(value, source, line, key);
        } else if (key == "m_tx") {
            t.m_tx = parse_number<Eigen::Index>(value, source, line, key);
        } else if (key == "q_streams") {
            t.q_streams = parse_number<Eigen::Index>(value, source, line, key);
        } else if (key == "n_interferers") {
            t.n_interferers =
                parse_number<std::size_t>(value, source, line, key);
        } else if (key == "interferer_antennas") {
            t.interferer_antennas =
                parse_number<Eigen::Index>(value, source, line, key);
        } else if (key == "snr_db") {
            t.snr_db = parse_number<double>(value, source, line, key);
        } else if (key == "sir_c_db") {
            t.sir_c_db = parse_number<double>(value, source, line, key);
        } else if (key == "sir_cp_db") {
            t.sir_cp_db = parse_number<double>(value, source, line, key);
        } else if (key == "irr_db") {
            t.irr_bound_db = parse_number<double>(value, source, line, key);
        } else if (key == "fixed_irr") {
            t.fixed_irr = parse_bool(value, source, line, key);
        } else if (key == "mirror_aliasing") {
            t.mirror_aliasing = parse_bool(value, source, line, key);
        } else if (key == "channels") {
            t.channels = parse_channels(value, source, line);
        } else if (key == "noise_power") {
            t.noise_power = parse_number<double>(value, source, line, key);
        } else {
            fail_at(source, line, "unknown key '" + key + "'");
        }
    }
    if (!seen.count("sweep"))
        throw ConfigError(source + ": missing required key 'sweep'");
    if (!seen.count("sweep_values"))
        throw ConfigError(source + ": missing required key 'sweep_values'");
    check_config(cfg, source);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in, path);
}

std::string print_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    auto join = [](const std::vector<std::string>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ", ";
            s += items[i];
        }
        return s;
    };
    std::vector<std::string> values, receivers, modes;
    for (double v : cfg.sweep_values) values.push_back(fmt_double(v));
    for (CombinerKind k : cfg.receivers) receivers.push_back(to_string(k));
    for (ImbalanceMode m : cfg.modes) modes.push_back(to_string(m));

    const ScenarioTemplate& t = cfg.tmpl;
    out << "metric = " << to_string(cfg.metric) << "\n"
        << "sweep = " << to_string(cfg.sweep) << "\n"
        << "sweep_values = " << join(values) << "\n"
        << "receivers = " << join(receivers) << "\n"
        << "modes = " << join(modes) << "\n"
        << "trials = " << cfg.trials << "\n"
        << "symbols_per_trial = " << cfg.symbols_per_trial << "\n"
        << "seed = " << cfg.seed << "\n"
        << "threads = " << cfg.threads << "\n"
        << "average_db_domain = " << (cfg.average_db_domain ? "true" : "false")
        << "\n"
        << "condition_limit = " << fmt_double(cfg.condition_limit) << "\n"
        << "n_rx = " << t.n_rx << "\n"
        << "n_users_c = " << t.n_users_c << "\n"
        << "n_users_cp = " << t.n_users_cp << "\n"
        << "m_tx = " << t.m_tx << "\n"
        << "q_streams = " << t.q_streams << "\n"
        << "n_interferers = " << t.n_interferers << "\n"
        << "interferer_antennas = " << t.interferer_antennas << "\n"
        << "snr_db = " << fmt_double(t.snr_db) << "\n"
        << "sir_c_db = " << fmt_double(t.sir_c_db) << "\n"
        << "sir_cp_db = " << fmt_double(t.sir_cp_db) << "\n"
        << "irr_db = " << fmt_double(t.irr_bound_db) << "\n"
        << "fixed_irr = " << (t.fixed_irr ? "true" : "false") << "\n"
        << "mirror_aliasing = " << (t.mirror_aliasing ? "true" : "false")
        << "\n"
        << "channels = " << channels_name(t.channels) << "\n"
        << "noise_power = " << fmt_double(t.noise_power) << "\n";
    return out.str();
}

ScenarioTemplate apply_sweep_value(const ScenarioTemplate& base, SweepParam p,
                                   double value) {
    ScenarioTemplate t = base;
    auto as_count = [&](const char* what, double minimum) -> long long {
        const double r = std::round(value);
        if (std::abs(value - r) > 1e-9 || r < minimum)
            throw ConfigError(
                std::string("sweep value for ") + what +
                " must be an integer >= " + fmt_double(minimum) + ", got " +
                fmt_double(value));
        return static_cast<long long>(r);
    };
    switch (p) {
    case SweepParam::SnrDb: t.snr_db = value; break;
    case SweepParam::SirBothDb:
        t.sir_c_db = value;
        t.sir_cp_db = value;
        break;
    case SweepParam::SirCDb: t.sir_c_db = value; break;
    case SweepParam::SirCpDb: t.sir_cp_db = value; break;
    case SweepParam::IrrDb:
        if (value <= 0.0)
            throw ConfigError("irr_db sweep value must be positive");
        t.irr_bound_db = value;
        break;
    case SweepParam::NInterferers:
        t.n_interferers =
            static_cast<std::size_t>(as_count("n_interferers", 0));
        break;
    case SweepParam::NRx:
        t.n_rx = static_cast<Eigen::Index>(as_count("n_rx", 1));
        break;
    case SweepParam::NUsers: {
        const auto n = static_cast<std::size_t>(as_count("n_users", 1));
        t.n_users_c = n;
        t.n_users_cp = n;
        break;
    }
    }
    return t;
}

namespace {

unsigned resolve_threads(unsigned configured) {
    if (const char* env = std::getenv("IQMIMO_THREADS")) {
        unsigned v = 0;
        const std::string_view sv(env);
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec != std::errc{} || ptr != sv.data() + sv.size() || v == 0)
            throw ConfigError("IQMIMO_THREADS must be a positive integer, got '" +
                              std::string(env) + "'");
        return v;
    }
    if (configured > 0) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace

ResultTable run_sweep(const ExperimentConfig& cfg) {
    check_config(cfg, "config");
    const auto t0 = std::chrono::steady_clock::now();
    const unsigned threads = resolve_threads(cfg.threads);
    ResultTable table;
    for (double value : cfg.sweep_values) {
        EvalRequest req;
        req.tmpl = apply_sweep_value(cfg.tmpl, cfg.sweep, value);
        req.modes = cfg.modes;
        req.receivers = cfg.receivers;
        req.metric = cfg.metric;
        req.n_trials = cfg.trials;
        req.symbols_per_trial = cfg.symbols_per_trial;
        req.master_seed = cfg.seed;
        // Same trial seeds at every sweep point: curves along the sweep axis
        // are paired, so shapes (gaps, monotone trends) are not blurred by
        // re-rolled randomness.
        req.sweep_index = 0;
        req.threads = threads;
        req.average_db_domain = cfg.average_db_domain;
        req.condition_limit = cfg.condition_limit;
        const EvalResult res = evaluate(req);
        for (const CellResult& cell : res.cells) {
            ResultRow row;
            row.sweep_param = to_string(cfg.sweep);
            row.sweep_value = value;
            row.receiver = to_string(cell.receiver);
            row.mode = to_string(cell.mode);
            row.metric = to_string(cfg.metric);
            row.mean = cell.mean;
            row.stderr_value = cell.stderr_value;
            row.n_trials = cell.n_trials;
            table.rows.push_back(std::move(row));
        }
    }
    table.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return table;
}

namespace {

constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,receiver,mode,metric,mean,stderr,n_trials";

} // namespace

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    out << kCsvHeader << "\n";
    for (const ResultRow& r : table.rows)
        out << r.sweep_param << ',' << fmt_g6(r.sweep_value) << ','
            << r.receiver << ',' << r.mode << ',' << r.metric << ','
            << fmt_g6(r.mean) << ',' << fmt_g6(r.stderr_value) << ','
            << r.n_trials << "\n";
    return out.str();
}

ResultTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader)
        throw ConfigError("csv: missing or unexpected header row");
    ResultTable table;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = stripped.find(',', start);
            fields.push_back(stripped.substr(
                start,
                comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 8)
            fail_at("csv", number, "expected 8 fields, got " +
                                       std::to_string(fields.size()));
        ResultRow row;
        row.sweep_param = fields[0];
        row.sweep_value = parse_number<double>(fields[1], "csv", number,
                                               "sweep_value");
        row.receiver = fields[2];
        row.mode = fields[3];
        row.metric = fields[4];
        row.mean = parse_number<double>(fields[5], "csv", number, "mean");
        row.stderr_value =
            parse_number<double>(fields[6], "csv", number, "stderr");
        row.n_trials =
            parse_number<std::size_t>(fields[7], "csv", number, "n_trials");
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_json(const ResultTable& table) {
    nlohmann::json j;
    j["elapsed_seconds"] = table.elapsed_seconds;
    j["rows"] = nlohmann::json::array();
    for (const ResultRow& r : table.rows)
        j["rows"].push_back({{"sweep_param", r.sweep_param},
                             {"sweep_value", r.sweep_value},
                             {"receiver", r.receiver},
                             {"mode", r.mode},
                             {"metric", r.metric},
                             {"mean", r.mean},
                             {"stderr", r.stderr_value},
                             {"n_trials", r.n_trials}});
    return j.dump(2) + "\n";
}

namespace {

void write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// Fast self-check of the numerical core; prints one line per check.
int run_validate(std::ostream& os) {
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok) {
        os << (ok ? "PASS  " : "FAIL  ") << name << "\n";
        all_ok &= ok;
    };

    {
        using namespace complexity;
        report("fft flop model exact at C=64 and C=1024",
               fft_flops(64) == 1152.0 && fft_flops(1024) == 33968.0);
        FlopModelInputs lms{1024, 20, 10, AdaptAlgo::Lms, Processing::Linear};
        FlopModelInputs rls{8192, 100, 50, AdaptAlgo::Rls, Processing::Linear};
        auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
        report("chain ratio spot values",
               round2(chain_ratio(lms)) == 1.87 &&
                   round2(chain_ratio(rls)) == 3.98);
    }

    {
        rng::Xoshiro256pp g(11);
        bool ok = true;
        for (int i = 0; i < 200; ++i) {
            const auto tx = sample_imbalance(12.0, IqSide::Tx, g);
            const auto rx = sample_imbalance(12.0, IqSide::Rx, g);
            const auto ctx = iq_coeffs(tx);
            const auto crx = iq_coeffs(rx);
            ok &= std::abs(ctx.k1 + ctx.k2 - 1.0) < 1e-14;
            ok &= std::abs(crx.k1 + std::conj(crx.k2) - 1.0) < 1e-14;
            ok &= irr_db(ctx) >= 12.0 - 1e-9 && irr_db(crx) >= 12.0 - 1e-9;
        }
        report("iq coefficient identities and IRR floor", ok);
    }

    {
        rng::Xoshiro256pp g(7);
        const SubcarrierScenario scn = draw_scenario(basic_defaults(), g);
        Workspace ws(scn);
        const CombinerWeights aug = augmented_lmmse_weights(ws);
        const CombinerWeights lin = lmmse_weights(ws);

        bool residual_ok = true, closure_ok = true, mse_ok = true;
        for (std::size_t s = 0; s < aug.streams.size(); ++s) {
            const StreamRef ref = aug.streams[s];
            const CVec v =
                stream_cross_correlation(ws, ref.user, ref.stream, true);
            const CVec res = ws.aug_cov().multiply(aug.per_stream[s]) - v;
            residual_ok &= res.norm() <= 1e-10 * v.norm();
            const PowerDecomposition d =
                power_decomposition(ws, aug, ref.user, ref.stream);
            const double quad = ws.aug_cov().quad(aug.per_stream[s]);
            closure_ok &= std::abs(d.total() - quad) <= 1e-10 * quad;
            mse_ok &= stream_mse(ws, aug, ref.user, ref.stream) <=
                      stream_mse(ws, lin, ref.user, ref.stream) + 1e-12;
        }
        report("lmmse normal-equation residual below 1e-10", residual_ok);
        report("power decomposition closes to w^H R w", closure_ok);
        report("augmented mse never above per-subcarrier mse", mse_ok);
    }

    {
        EvalRequest req;
        req.tmpl = basic_defaults();
        req.tmpl.n_rx = 8;
        req.tmpl.n_users_c = 2;
        req.tmpl.n_users_cp = 2;
        req.tmpl.n_interferers = 2;
        req.modes = {ImbalanceMode::TxRx};
        req.receivers = {CombinerKind::AugmentedLmmse, CombinerKind::Lmmse};
        req.n_trials = 6;
        req.master_seed = 99;
        req.threads = 1;
        EvalResult one = evaluate(req);
        req.threads = 3;
        EvalResult three = evaluate(req);
        bool ok = one.cells.size() == three.cells.size();
        for (std::size_t i = 0; ok && i < one.cells.size(); ++i)
            ok &= one.cells[i].mean == three.cells[i].mean &&
                  one.cells[i].stderr_value == three.cells[i].stderr_value;
        report("results independent of thread count", ok);
    }

    {
        std::vector<std::uint64_t> seeds;
        seeds.reserve(10000);
        for (std::uint64_t sweep = 0; sweep < 4; ++sweep)
            for (std::uint64_t trial = 0; trial < 2500; ++trial)
                seeds.push_back(derive_trial_seed(1, sweep, trial));
        std::sort(seeds.begin(), seeds.end());
        report("derived trial seeds are distinct",
               std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    }

    os << (all_ok ? "all checks passed\n" : "some checks FAILED\n");
    return all_ok ? 0 : 1;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Uplink MU-MIMO link simulator under TX/RX I/Q imbalance"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    unsigned threads = 0;

    CLI::App* sweep =
        app.add_subcommand("sweep", "Run a Monte Carlo sweep from a config file");
    sweep->add_option("--config", config_path, "experiment configuration file")
        ->required();
    CLI::Option* out_opt =
        sweep->add_option("--out", out_path, "output path (default: stdout)");
    sweep->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    CLI::Option* seed_opt =
        sweep->add_option("--seed", seed, "override the master seed");
    CLI::Option* trials_opt =
        sweep->add_option("--trials", trials, "override the trial count");
    CLI::Option* threads_opt = sweep->add_option(
        "--threads", threads,
        "worker threads (IQMIMO_THREADS overrides; 0 = hardware count)");

    std::string cx_format = "text";
    std::string cx_out;
    CLI::App* cx = app.add_subcommand(
        "complexity", "Print the augmented/per-subcarrier flop ratio table");
    cx->add_option("--format", cx_format, "output format")
        ->check(CLI::IsMember({"text", "csv"}));
    CLI::Option* cx_out_opt =
        cx->add_option("--out", cx_out, "output path (default: stdout)");

    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Run the built-in numerical self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sweep->parsed()) {
            ExperimentConfig cfg = parse_config_file(config_path);
            if (*seed_opt) cfg.seed = seed;
            if (*trials_opt) cfg.trials = trials;
            if (*threads_opt) cfg.threads = threads;
            const ResultTable table = run_sweep(cfg);
            write_output(format == "json" ? to_json(table) : to_csv(table),
                         *out_opt ? out_path : std::string());
            return 0;
        }
        if (cx->parsed()) {
            const complexity::RatioTable table = complexity::ratio_table();
            const std::string text = cx_format == "csv"
                                         ? complexity::ratio_table_csv(table)
                                         : complexity::format_ratio_table(table);
            write_output(text, *cx_out_opt ? cx_out : std::string());
            return 0;
        }
        if (validate_cmd->parsed()) return run_validate(std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace iqmimo
