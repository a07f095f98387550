#include "iqmimo/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace iqmimo {

StreamSelector StreamSelector::for_stream(Eigen::Index stream,
                                          Eigen::Index n_streams) {
    if (stream < 0 || stream >= n_streams)
        throw std::out_of_range("StreamSelector: stream index out of range");
    StreamSelector sel;
    sel.gamma = RVec::Zero(n_streams);
    sel.gamma[stream] = 1.0;
    sel.delta = RVec::Ones(n_streams) - sel.gamma;
    return sel;
}

namespace {

// Per-stream coefficients of one user's symbols in the combiner output.
// Direct users (data on c) arrive through [psi; conj(omega)], so the
// coefficient vector is G^H (psi^H w_t + omega^T w_b); mirror users (data on
// c') arrive conjugated through [omega; conj(psi)], giving
// G^T (omega^H w_t + psi^T w_b) after pulling the conjugate out of the norm.
// In the linear space only the top blocks survive (w_b absent).
CVec direct_coeffs(const UserEffective& eff, const CMat& precoder,
                   const CVec& w, bool augmented) {
    const Eigen::Index n = eff.psi.rows();
    if (augmented) {
        CVec inner = eff.psi.adjoint() * w.head(n) +
                     eff.omega.transpose() * w.tail(n);
        return precoder.adjoint() * inner;
    }
    return precoder.adjoint() * (eff.psi.adjoint() * w);
}

CVec mirror_coeffs(const UserEffective& eff, const CMat& precoder,
                   const CVec& w, bool augmented) {
    const Eigen::Index n = eff.psi.rows();
    if (augmented) {
        CVec inner = eff.omega.adjoint() * w.head(n) +
                     eff.psi.transpose() * w.tail(n);
        return precoder.transpose() * inner;
    }
    return precoder.transpose() * (eff.omega.adjoint() * w);
}

// y^H R_z y for the interference-plus-noise covariance of one subcarrier,
// without forming R_z: sigma_n^2 |y|^2 + sum_l sigma_l^2 |H_l^H y|^2.
double noise_quad(const std::vector<InterfererConfig>& interferers,
                  double noise_power, const CVec& y) {
    double p = noise_power * y.squaredNorm();
    for (const auto& intf : interferers)
        p += intf.power * (intf.channel.adjoint() * y).squaredNorm();
    return p;
}

} // namespace

PowerDecomposition power_decomposition(Workspace& ws,
                                       const CombinerWeights& weights,
                                       std::size_t user, Eigen::Index stream) {
    const SubcarrierScenario& scn = ws.scn();
    const bool augmented = weights.kind == CombinerKind::AugmentedLmmse;
    const Eigen::Index flat = ws.stream_index(user, stream);
    const CVec& w = weights.per_stream.at(static_cast<std::size_t>(flat));
    const Eigen::Index n = scn.n_rx;
    if (w.size() != (augmented ? 2 * n : n))
        throw std::invalid_argument(
            "power_decomposition: weight length does not match kind");

    PowerDecomposition d;

    for (std::size_t i = 0; i < scn.users_c.size(); ++i) {
        const UserConfig& u = scn.users_c[i];
        const CVec a = direct_coeffs(ws.eff_c()[i], u.precoder, w, augmented);
        if (i == user) {
            const double own = std::norm(a[stream]);
            d.p_signal = u.stream_power * own;
            d.p_isi = u.stream_power * (a.squaredNorm() - own);
        } else {
            d.p_iui_c += u.stream_power * a.squaredNorm();
        }
    }

    for (std::size_t v = 0; v < scn.users_cp.size(); ++v) {
        const UserConfig& u = scn.users_cp[v];
        const CVec b = mirror_coeffs(ws.eff_cp()[v], u.precoder, w, augmented);
        d.p_iui_cp += u.stream_power * b.squaredNorm();
    }

    // Interference-plus-noise reaches the output through the RX stacks:
    // y_a^H z_c + y_b^H conj(z_cp) with y_a = Ka^H w, y_b = Kb^H w. In the
    // linear space the stacks reduce to their top diagonals.
    CVec y_a, y_b;
    if (augmented) {
        y_a = ws.k_rx_a().top.conjugate().cwiseProduct(w.head(n)) +
              ws.k_rx_a().bottom.conjugate().cwiseProduct(w.tail(n));
        y_b = ws.k_rx_b().top.conjugate().cwiseProduct(w.head(n)) +
              ws.k_rx_b().bottom.conjugate().cwiseProduct(w.tail(n));
    } else {
        y_a = ws.k_rx_a().top.conjugate().cwiseProduct(w);
        y_b = ws.k_rx_b().top.conjugate().cwiseProduct(w);
    }
    d.p_z_c = noise_quad(scn.interferers_c, scn.noise_power, y_a);
    // conj(z_cp) flips the interferer channels to their conjugates.
    d.p_z_cp = noise_quad(scn.interferers_cp, scn.noise_power, y_b.conjugate());
    return d;
}

PowerDecomposition power_decomposition(const SubcarrierScenario& scn,
                                       const CombinerWeights& weights,
                                       std::size_t user, Eigen::Index stream) {
    Workspace ws(scn);
    return power_decomposition(ws, weights, user, stream);
}

double sinr_db(const PowerDecomposition& d) {
    return 10.0 * std::log10(d.p_signal / d.denominator());
}

double ScenarioTemplate::stream_power() const {
    return std::pow(10.0, snr_db / 10.0) * noise_power /
           static_cast<double>(q_streams);
}

double ScenarioTemplate::interferer_power(double sir_db) const {
    const double total = static_cast<double>(n_interferers) *
                         static_cast<double>(interferer_antennas);
    if (total == 0.0) return 0.0;
    return std::pow(10.0, (snr_db - sir_db) / 10.0) * noise_power / total;
}

ScenarioTemplate basic_defaults() { return ScenarioTemplate{}; }

ScenarioTemplate massive_mimo_defaults() {
    ScenarioTemplate t;
    t.n_rx = 100;
    t.n_users_c = 5;
    t.n_users_cp = 5;
    t.m_tx = 1;
    t.q_streams = 1;
    t.n_interferers = 0;
    t.irr_bound_db = 20.0;
    t.fixed_irr = true;
    t.mirror_aliasing = true;
    return t;
}

namespace {

CMat draw_matrix(Eigen::Index rows, Eigen::Index cols, ChannelDist dist,
                 rng::Xoshiro256pp& g) {
    CMat h(rows, cols);
    if (dist == ChannelDist::FixedUnit) {
        h.setOnes();
        return h;
    }
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            h(r, c) = rng::circular_normal(g);
    return h;
}

std::vector<IqBranchParams> draw_branches(std::size_t n, IqSide side,
                                          const ScenarioTemplate& tmpl,
                                          rng::Xoshiro256pp& g) {
    std::vector<IqBranchParams> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(tmpl.fixed_irr
                          ? sample_fixed_irr(tmpl.irr_bound_db, side, g)
                          : sample_imbalance(tmpl.irr_bound_db, side, g));
    return out;
}

UserConfig draw_user(const ScenarioTemplate& tmpl, rng::Xoshiro256pp& g) {
    UserConfig u;
    u.precoder = CMat::Identity(tmpl.m_tx, tmpl.q_streams);
    u.stream_power = tmpl.stream_power();
    u.channel_c = draw_matrix(tmpl.n_rx, tmpl.m_tx, tmpl.channels, g);
    u.channel_cp = draw_matrix(tmpl.n_rx, tmpl.m_tx, tmpl.channels, g);
    u.tx_iq_c = draw_branches(static_cast<std::size_t>(tmpl.m_tx), IqSide::Tx,
                              tmpl, g);
    u.tx_iq_cp = draw_branches(static_cast<std::size_t>(tmpl.m_tx), IqSide::Tx,
                               tmpl, g);
    return u;
}

std::vector<InterfererConfig> draw_interferers(const ScenarioTemplate& tmpl,
                                               double sir_db,
                                               rng::Xoshiro256pp& g) {
    std::vector<InterfererConfig> out;
    out.reserve(tmpl.n_interferers);
    for (std::size_t l = 0; l < tmpl.n_interferers; ++l) {
        InterfererConfig intf;
        intf.channel = draw_matrix(tmpl.n_rx, tmpl.interferer_antennas,
                                   tmpl.channels, g);
        intf.power = tmpl.interferer_power(sir_db);
        out.push_back(std::move(intf));
    }
    return out;
}

} // namespace

SubcarrierScenario draw_scenario(const ScenarioTemplate& tmpl,
                                 rng::Xoshiro256pp& g) {
    if (tmpl.mirror_aliasing && tmpl.n_users_cp != tmpl.n_users_c)
        throw std::invalid_argument(
            "draw_scenario: mirror aliasing requires equal user counts");
    SubcarrierScenario scn;
    scn.n_rx = tmpl.n_rx;
    scn.noise_power = tmpl.noise_power;
    scn.mirror_aliasing = tmpl.mirror_aliasing;

    scn.users_c.reserve(tmpl.n_users_c);
    for (std::size_t u = 0; u < tmpl.n_users_c; ++u)
        scn.users_c.push_back(draw_user(tmpl, g));

    if (tmpl.mirror_aliasing) {
        // Same devices occupy both subcarriers: the mirror entries are
        // verbatim copies (fields are labeled by subcarrier, not by role).
        scn.users_cp = scn.users_c;
    } else {
        scn.users_cp.reserve(tmpl.n_users_cp);
        for (std::size_t v = 0; v < tmpl.n_users_cp; ++v)
            scn.users_cp.push_back(draw_user(tmpl, g));
    }

    scn.interferers_c = draw_interferers(tmpl, tmpl.sir_c_db, g);
    scn.interferers_cp = draw_interferers(tmpl, tmpl.sir_cp_db, g);
    scn.rx_iq_c = draw_branches(static_cast<std::size_t>(tmpl.n_rx),
                                IqSide::Rx, tmpl, g);
    scn.rx_iq_cp = draw_branches(static_cast<std::size_t>(tmpl.n_rx),
                                 IqSide::Rx, tmpl, g);
    return apply_imbalance_mode(std::move(scn), tmpl.mode);
}

} // namespace iqmimo
