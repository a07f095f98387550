#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iqmimo/analysis.hpp"
#include "iqmimo/montecarlo.hpp"
#include "iqmimo/signal.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <stdexcept>

using namespace iqmimo;
using iqmimo::testing::max_abs_diff;
using iqmimo::testing::random_matrix;
using iqmimo::testing::random_scenario;
using iqmimo::testing::ScenarioShape;

TEST_CASE("stream selector splits the identity") {
    const StreamSelector sel = StreamSelector::for_stream(1, 4);
    REQUIRE(sel.gamma.size() == 4);
    CHECK(sel.gamma(0) == 0.0);
    CHECK(sel.gamma(1) == 1.0);
    CHECK(sel.gamma(2) == 0.0);
    CHECK((sel.gamma + sel.delta).minCoeff() == 1.0);
    CHECK((sel.gamma + sel.delta).maxCoeff() == 1.0);
}

TEST_CASE("the six power terms sum to the output power for any weights") {
    rng::Xoshiro256pp g(1);
    for (int rep = 0; rep < 8; ++rep) {
        const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
        Workspace ws(scn);
        for (CombinerKind kind :
             {CombinerKind::Lmmse, CombinerKind::AugmentedLmmse,
              CombinerKind::Mrc}) {
            CombinerWeights w = kind == CombinerKind::Lmmse
                                    ? lmmse_weights(ws)
                                : kind == CombinerKind::AugmentedLmmse
                                    ? augmented_lmmse_weights(ws)
                                    : mrc_weights(ws);
            // Arbitrary weights must close too; overwrite one stream.
            w.per_stream[1] = random_matrix(w.per_stream[1].size(), 1, g);
            for (std::size_t s : {std::size_t{0}, std::size_t{1}}) {
                const auto [user, stream] = w.streams[s];
                const PowerDecomposition d =
                    power_decomposition(ws, w, user, stream);
                const bool aug = kind == CombinerKind::AugmentedLmmse;
                const double quad = aug ? ws.aug_cov().quad(w.per_stream[s])
                                        : ws.lin_cov().quad(w.per_stream[s]);
                CHECK(d.total() ==
                      doctest::Approx(quad).epsilon(1e-10));
                CHECK(d.p_signal >= 0.0);
                CHECK(d.p_isi >= -1e-15);
                CHECK(d.denominator() ==
                      doctest::Approx(d.total() - d.p_signal).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("scenario and workspace overloads agree") {
    rng::Xoshiro256pp g(2);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    Workspace ws(scn);
    const CombinerWeights w = augmented_lmmse_weights(ws);
    const PowerDecomposition a = power_decomposition(ws, w, 1, 1);
    const PowerDecomposition b = power_decomposition(scn, w, 1, 1);
    CHECK(a.p_signal == b.p_signal);
    CHECK(a.p_z_cp == b.p_z_cp);
    CHECK(a.total() == doctest::Approx(b.total()).epsilon(1e-14));
}

namespace {

// Empirical mean output power E|w^H r|^2 with only the masked inputs active.
enum class Keep { Signal, Isi, IuiC, IuiCp, ZC, ZCp };

double isolated_power(const SubcarrierScenario& scn, const CVec& w, bool aug,
                      std::size_t user, Eigen::Index stream, Keep keep,
                      int trials, rng::Xoshiro256pp& g) {
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        SnapshotDraw d = draw_snapshot_inputs(scn, SymbolKind::Gaussian, g);
        SnapshotDraw m = d;
        for (auto& x : m.x_c) x.setZero();
        for (auto& x : m.x_cp) x.setZero();
        for (auto& x : m.s_int_c) x.setZero();
        for (auto& x : m.s_int_cp) x.setZero();
        m.noise_c.setZero();
        m.noise_cp.setZero();
        switch (keep) {
        case Keep::Signal:
            m.x_c[user].setZero();
            m.x_c[user](stream) = d.x_c[user](stream);
            break;
        case Keep::Isi:
            m.x_c[user] = d.x_c[user];
            m.x_c[user](stream) = 0.0;
            break;
        case Keep::IuiC:
            for (std::size_t u = 0; u < m.x_c.size(); ++u)
                if (u != user) m.x_c[u] = d.x_c[u];
            break;
        case Keep::IuiCp:
            m.x_cp = d.x_cp;
            break;
        case Keep::ZC:
            m.s_int_c = d.s_int_c;
            m.noise_c = d.noise_c;
            break;
        case Keep::ZCp:
            m.s_int_cp = d.s_int_cp;
            m.noise_cp = d.noise_cp;
            break;
        }
        const Snapshot snap = assemble_snapshot(scn, m);
        const Complex y =
            aug ? w.dot(augment(snap).r_aug) : w.dot(snap.r_c);
        acc += std::norm(y);
    }
    return acc / trials;
}

} // namespace

TEST_CASE("each power term matches its isolated physical source") {
    // The decomposition claims a physical meaning for every term. Verify by
    // Monte Carlo: turn on one input group at a time in the signal chain and
    // compare the resulting output power with the analytic term.
    rng::Xoshiro256pp g(3);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    Workspace ws(scn);
    const std::size_t user = 0;
    const Eigen::Index stream = 1;
    const int trials = 20000;

    for (bool aug : {false, true}) {
        CAPTURE(aug);
        const CombinerWeights w =
            aug ? augmented_lmmse_weights(ws) : lmmse_weights(ws);
        const std::size_t s =
            static_cast<std::size_t>(ws.stream_index(user, stream));
        const PowerDecomposition d = power_decomposition(ws, w, user, stream);
        const CVec& wv = w.per_stream[s];

        const auto mc = [&](Keep keep) {
            return isolated_power(scn, wv, aug, user, stream, keep, trials, g);
        };
        CHECK(mc(Keep::Signal) == doctest::Approx(d.p_signal).epsilon(0.08));
        CHECK(mc(Keep::Isi) == doctest::Approx(d.p_isi).epsilon(0.08));
        CHECK(mc(Keep::IuiC) == doctest::Approx(d.p_iui_c).epsilon(0.08));
        CHECK(mc(Keep::IuiCp) == doctest::Approx(d.p_iui_cp).epsilon(0.08));
        CHECK(mc(Keep::ZC) == doctest::Approx(d.p_z_c).epsilon(0.08));
        CHECK(mc(Keep::ZCp) == doctest::Approx(d.p_z_cp).epsilon(0.08));
    }
}

TEST_CASE("sinr is invariant to weight scaling") {
    rng::Xoshiro256pp g(4);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    Workspace ws(scn);
    CombinerWeights w = augmented_lmmse_weights(ws);
    const double base = sinr_db(power_decomposition(ws, w, 0, 0));
    w.per_stream[0] *= Complex((-2.7), 1.3);
    const double scaled = sinr_db(power_decomposition(ws, w, 0, 0));
    CHECK(scaled == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("template presets and power bookkeeping") {
    const ScenarioTemplate basic = basic_defaults();
    CHECK(basic.n_rx == 20);
    CHECK(basic.n_users_c == 5);
    CHECK(basic.n_users_cp == 5);
    CHECK(basic.m_tx == 2);
    CHECK(basic.q_streams == 2);
    CHECK(basic.n_interferers == 8);
    CHECK(basic.snr_db == 20.0);
    CHECK(basic.sir_c_db == -20.0);
    CHECK(basic.irr_bound_db == 25.0);
    CHECK_FALSE(basic.fixed_irr);
    CHECK_FALSE(basic.mirror_aliasing);
    // SNR 20 dB over unit noise split across 2 streams.
    CHECK(basic.stream_power() == doctest::Approx(50.0).epsilon(1e-12));
    // SIR -20 dB: interference 40 dB over noise, split across 8 interferers.
    CHECK(basic.interferer_power(-20.0) ==
          doctest::Approx(1250.0).epsilon(1e-12));

    const ScenarioTemplate massive = massive_mimo_defaults();
    CHECK(massive.n_rx == 100);
    CHECK(massive.n_users_c == 5);
    CHECK(massive.m_tx == 1);
    CHECK(massive.q_streams == 1);
    CHECK(massive.n_interferers == 0);
    CHECK(massive.irr_bound_db == 20.0);
    CHECK(massive.fixed_irr);
    CHECK(massive.mirror_aliasing);
    CHECK(massive.stream_power() == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(massive.interferer_power(-20.0) == 0.0); // no interferers to split
}

TEST_CASE("scenario draws are deterministic and obey the template") {
    ScenarioTemplate tmpl = basic_defaults();
    tmpl.n_rx = 6;
    tmpl.n_users_c = 2;
    tmpl.n_users_cp = 2;
    tmpl.n_interferers = 2;

    rng::Xoshiro256pp g1(11), g2(11), g3(12);
    const SubcarrierScenario a = draw_scenario(tmpl, g1);
    const SubcarrierScenario b = draw_scenario(tmpl, g2);
    const SubcarrierScenario c = draw_scenario(tmpl, g3);
    CHECK(max_abs_diff(a.users_c[1].channel_cp, b.users_c[1].channel_cp) ==
          0.0);
    CHECK(a.rx_iq_c[3].gain == b.rx_iq_c[3].gain);
    CHECK(max_abs_diff(a.users_c[1].channel_cp, c.users_c[1].channel_cp) >
          0.0);

    validate(a);
    CHECK(a.n_rx == 6);
    CHECK(a.users_c.size() == 2);
    CHECK(a.interferers_cp.size() == 2);
    CHECK(a.users_c[0].stream_power == doctest::Approx(50.0));
    CHECK(a.interferers_c[0].power ==
          doctest::Approx(tmpl.interferer_power(tmpl.sir_c_db)));
    CHECK(a.noise_power == 1.0);
    CHECK_FALSE(a.mirror_aliasing);
}

TEST_CASE("mirror aliasing duplicates the device onto both subcarriers") {
    ScenarioTemplate tmpl = massive_mimo_defaults();
    tmpl.n_rx = 8;
    tmpl.n_users_c = 3;
    tmpl.n_users_cp = 3;
    tmpl.channels = ChannelDist::FixedUnit;
    rng::Xoshiro256pp g(21);
    const SubcarrierScenario scn = draw_scenario(tmpl, g);
    validate(scn);
    CHECK(scn.mirror_aliasing);
    REQUIRE(scn.users_cp.size() == 3);
    for (std::size_t u = 0; u < 3; ++u) {
        CHECK(max_abs_diff(scn.users_cp[u].channel_c,
                           scn.users_c[u].channel_c) == 0.0);
        CHECK(max_abs_diff(scn.users_cp[u].channel_cp,
                           scn.users_c[u].channel_cp) == 0.0);
        CHECK(scn.users_cp[u].tx_iq_c[0].gain == scn.users_c[u].tx_iq_c[0].gain);
        CHECK(scn.users_cp[u].tx_iq_cp[0].phase ==
              scn.users_c[u].tx_iq_cp[0].phase);
    }
    // Fixed-IRR sampling: every branch sits exactly on the target.
    const double irr = irr_db(iq_coeffs(scn.users_c[0].tx_iq_c[0]));
    CHECK(irr == doctest::Approx(20.0).epsilon(1e-9));
    const double irr_rx = irr_db(iq_coeffs(scn.rx_iq_cp[5]));
    CHECK(irr_rx == doctest::Approx(20.0).epsilon(1e-9));
    // FixedUnit channels carry no randomness.
    CHECK(scn.users_c[2].channel_c ==
          CMat::Ones(tmpl.n_rx, tmpl.m_tx));
}

TEST_CASE("imbalance mode substitution happens after the full draw") {
    ScenarioTemplate with_iq = basic_defaults();
    with_iq.n_rx = 5;
    with_iq.n_users_c = 2;
    with_iq.n_users_cp = 2;
    with_iq.n_interferers = 1;
    ScenarioTemplate none = with_iq;
    none.mode = ImbalanceMode::None;

    rng::Xoshiro256pp g1(31), g2(31);
    const SubcarrierScenario full = draw_scenario(with_iq, g1);
    const SubcarrierScenario clean = draw_scenario(none, g2);
    CHECK(g1() == g2()); // identical consumption regardless of mode
    CHECK(max_abs_diff(full.users_c[0].channel_c,
                       clean.users_c[0].channel_c) == 0.0);
    CHECK(max_abs_diff(full.interferers_cp[0].channel,
                       clean.interferers_cp[0].channel) == 0.0);
    CHECK(clean.users_c[0].tx_iq_c[0].gain == 1.0);
    CHECK(clean.users_c[0].tx_iq_c[0].phase == 0.0);
    CHECK(clean.rx_iq_cp[4].gain == 1.0);
    CHECK(full.rx_iq_cp[4].gain != 1.0);
}

namespace {

ScenarioTemplate tiny_template() {
    ScenarioTemplate t = basic_defaults();
    t.n_rx = 8;
    t.n_users_c = 2;
    t.n_users_cp = 2;
    t.n_interferers = 2;
    return t;
}

} // namespace

TEST_CASE("evaluation grid is deterministic and thread-count independent") {
    EvalRequest req;
    req.tmpl = tiny_template();
    req.modes = {ImbalanceMode::None, ImbalanceMode::TxRx};
    req.receivers = {CombinerKind::Lmmse, CombinerKind::AugmentedLmmse};
    req.n_trials = 8;
    req.master_seed = 7;

    const EvalResult a = evaluate(req);
    REQUIRE(a.cells.size() == 4);
    CHECK(a.cells[0].mode == ImbalanceMode::None);
    CHECK(a.cells[0].receiver == CombinerKind::Lmmse);
    CHECK(a.cells[1].receiver == CombinerKind::AugmentedLmmse);
    CHECK(a.cells[2].mode == ImbalanceMode::TxRx);

    const EvalResult b = evaluate(req);
    EvalRequest threaded = req;
    threaded.threads = 3;
    const EvalResult c = evaluate(threaded);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.cells[i].mean == b.cells[i].mean);
        CHECK(a.cells[i].mean == c.cells[i].mean);
        CHECK(a.cells[i].stderr_value == c.cells[i].stderr_value);
    }

    CHECK(&a.cell(ImbalanceMode::TxRx, CombinerKind::Lmmse) == &a.cells[2]);
    CHECK_THROWS_AS((void)a.cell(ImbalanceMode::RxOnly, CombinerKind::Mrc),
                    std::out_of_range);
}

TEST_CASE("single-mode runs reproduce the paired grid cells") {
    EvalRequest grid;
    grid.tmpl = tiny_template();
    grid.modes = {ImbalanceMode::None, ImbalanceMode::TxRx};
    grid.receivers = {CombinerKind::AugmentedLmmse};
    grid.n_trials = 6;
    grid.master_seed = 13;
    const EvalResult both = evaluate(grid);

    EvalRequest solo = grid;
    solo.modes = {ImbalanceMode::TxRx};
    const EvalResult one = evaluate(solo);
    CHECK(one.cells[0].mean ==
          both.cell(ImbalanceMode::TxRx, CombinerKind::AugmentedLmmse).mean);
}

TEST_CASE("standard error shrinks like one over root trials") {
    EvalRequest req;
    req.tmpl = tiny_template();
    req.receivers = {CombinerKind::AugmentedLmmse};
    req.n_trials = 64;
    req.master_seed = 5;
    const double se_small = evaluate(req).cells[0].stderr_value;
    req.n_trials = 256;
    const double se_big = evaluate(req).cells[0].stderr_value;
    CHECK(se_small / se_big > 1.3);
    CHECK(se_small / se_big < 3.1);
}

TEST_CASE("hopeless conditioning limit aborts after bounded retries") {
    EvalRequest req;
    req.tmpl = tiny_template();
    req.n_trials = 1;
    req.condition_limit = 1e-30; // demands rcond > 1e30: impossible
    CHECK_THROWS_AS((void)evaluate(req), std::runtime_error);
}

TEST_CASE("average_sinr reports per-stream values and sane errors") {
    const ScenarioTemplate tmpl = tiny_template();
    const SinrReport rep =
        average_sinr(tmpl, CombinerKind::AugmentedLmmse, 24, 3);
    CHECK(rep.n_trials == 24);
    REQUIRE(rep.per_stream_sinr_db.size() == 4); // 2 users x 2 streams
    CHECK(std::isfinite(rep.mean_sinr_db));
    CHECK(rep.stderr_db > 0.0);
    CHECK(rep.stderr_db < 5.0);
    for (double s : rep.per_stream_sinr_db) {
        CHECK(std::isfinite(s));
        CHECK(std::abs(s - rep.mean_sinr_db) < 15.0);
    }

    // dB-domain averaging gives a different (lower or equal) mean.
    const SinrReport db =
        average_sinr(tmpl, CombinerKind::AugmentedLmmse, 24, 3, 1, true);
    CHECK(db.mean_sinr_db <= rep.mean_sinr_db + 1e-9);
}

TEST_CASE("symbol error of the augmented receiver beats the linear one") {
    ScenarioTemplate tmpl = tiny_template();
    tmpl.snr_db = 14.0;
    tmpl.sir_c_db = 10.0;
    tmpl.sir_cp_db = 10.0;
    tmpl.irr_bound_db = 14.0; // strong imbalance
    const std::vector<CombinerKind> rx{CombinerKind::Lmmse,
                                       CombinerKind::AugmentedLmmse};
    const auto est = ser_montecarlo(tmpl, rx, 20, 60, 17);
    REQUIRE(est.size() == 2);
    // 20 trials x 60 symbols x 4 streams, pooled.
    CHECK(est[0].n_symbols == 4800);
    CHECK(est[1].n_symbols == 4800);
    CHECK(est[0].ser > 0.0);
    CHECK(est[0].ser < 1.0);
    CHECK(est[1].ser < est[0].ser + 0.02); // aug no worse (paired draws)
    CHECK(est[0].stderr_value > 0.0);
}
