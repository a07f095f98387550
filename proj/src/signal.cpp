#include "iqmimo/signal.hpp"

#include <cmath>

namespace iqmimo {

namespace {

// Unit-energy 16-QAM axis levels: {-3,-1,1,3}/sqrt(10).
constexpr double kQamStep = 0.31622776601683794; // 1/sqrt(10)

double draw_qam_axis(rng::Xoshiro256pp& g) {
    const auto idx = static_cast<int>(rng::uniform_unit(g) * 4.0);
    return kQamStep * static_cast<double>(2 * std::min(idx, 3) - 3);
}

double slice_qam_axis(double v) {
    if (v < -2.0 * kQamStep)
        return -3.0 * kQamStep;
    if (v < 0.0)
        return -kQamStep;
    if (v < 2.0 * kQamStep)
        return kQamStep;
    return 3.0 * kQamStep;
}

CVec draw_streams(const UserConfig& user, SymbolKind kind,
                  rng::Xoshiro256pp& g) {
    CVec x(user.q_streams());
    const double scale = std::sqrt(user.stream_power);
    for (Eigen::Index q = 0; q < x.size(); ++q)
        x[q] = scale * draw_symbol(kind, g);
    return x;
}

CVec draw_interferer(const InterfererConfig& intf, rng::Xoshiro256pp& g) {
    CVec s(intf.n_antennas());
    const double scale = std::sqrt(intf.power);
    for (Eigen::Index j = 0; j < s.size(); ++j)
        s[j] = scale * rng::circular_normal(g);
    return s;
}

CVec draw_noise(Eigen::Index n, double power, rng::Xoshiro256pp& g) {
    CVec v(n);
    const double scale = std::sqrt(power);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = scale * rng::circular_normal(g);
    return v;
}

} // namespace

Complex draw_symbol(SymbolKind kind, rng::Xoshiro256pp& g) {
    if (kind == SymbolKind::Gaussian)
        return rng::circular_normal(g);
    const double re = draw_qam_axis(g);
    const double im = draw_qam_axis(g);
    return {re, im};
}

Complex slice_qam16(Complex y) {
    return {slice_qam_axis(y.real()), slice_qam_axis(y.imag())};
}

SnapshotDraw draw_snapshot_inputs(const SubcarrierScenario& scn,
                                  SymbolKind kind, rng::Xoshiro256pp& g) {
    SnapshotDraw d;
    d.x_c.reserve(scn.users_c.size());
    for (const auto& u : scn.users_c)
        d.x_c.push_back(draw_streams(u, kind, g));
    d.x_cp.reserve(scn.users_cp.size());
    for (const auto& u : scn.users_cp)
        d.x_cp.push_back(draw_streams(u, kind, g));
    d.s_int_c.reserve(scn.interferers_c.size());
    for (const auto& i : scn.interferers_c)
        d.s_int_c.push_back(draw_interferer(i, g));
    d.s_int_cp.reserve(scn.interferers_cp.size());
    for (const auto& i : scn.interferers_cp)
        d.s_int_cp.push_back(draw_interferer(i, g));
    d.noise_c = draw_noise(scn.n_rx, scn.noise_power, g);
    d.noise_cp = draw_noise(scn.n_rx, scn.noise_power, g);
    return d;
}

namespace {

// Direct and image TX outputs of one entry given its drawn symbols.
void tx_outputs(const UserConfig& user, Subcarrier data_subcarrier,
                const CVec& x, CVec& s_data, CVec& s_image) {
    const bool data_on_c = data_subcarrier == Subcarrier::C;
    const IqDiagPair tx_d =
        stack_iq_matrices(data_on_c ? user.tx_iq_c : user.tx_iq_cp);
    const IqDiagPair tx_m =
        stack_iq_matrices(data_on_c ? user.tx_iq_cp : user.tx_iq_c);
    const CVec gx = user.precoder * x;
    s_data = tx_d.k1.cwiseProduct(gx);
    s_image = tx_m.k2.cwiseProduct(gx.conjugate());
}

} // namespace

TxSnapshot tx_snapshot(const UserConfig& user, Subcarrier data_subcarrier,
                       SymbolKind kind, rng::Xoshiro256pp& g) {
    TxSnapshot out;
    out.x = draw_streams(user, kind, g);
    tx_outputs(user, data_subcarrier, out.x, out.s_data, out.s_image);
    return out;
}

CVec interference_plus_noise(const SubcarrierScenario& scn, Subcarrier sc,
                             rng::Xoshiro256pp& g) {
    const auto& interferers =
        sc == Subcarrier::C ? scn.interferers_c : scn.interferers_cp;
    CVec z = CVec::Zero(scn.n_rx);
    for (const auto& intf : interferers)
        z.noalias() += intf.channel * draw_interferer(intf, g);
    z += draw_noise(scn.n_rx, scn.noise_power, g);
    return z;
}

Snapshot assemble_snapshot(const SubcarrierScenario& scn,
                           const SnapshotDraw& draw) {
    const Eigen::Index n = scn.n_rx;
    CVec pre_c = CVec::Zero(n);  // at c, before RX imbalance
    CVec pre_cp = CVec::Zero(n); // at c'

    CVec s_data, s_image;
    for (std::size_t u = 0; u < scn.users_c.size(); ++u) {
        const auto& user = scn.users_c[u];
        tx_outputs(user, Subcarrier::C, draw.x_c[u], s_data, s_image);
        pre_c.noalias() += user.channel_c * s_data;
        pre_cp.noalias() += user.channel_cp * s_image;
    }
    for (std::size_t v = 0; v < scn.users_cp.size(); ++v) {
        const auto& user = scn.users_cp[v];
        tx_outputs(user, Subcarrier::Cp, draw.x_cp[v], s_data, s_image);
        pre_cp.noalias() += user.channel_cp * s_data;
        pre_c.noalias() += user.channel_c * s_image;
    }
    for (std::size_t l = 0; l < scn.interferers_c.size(); ++l)
        pre_c.noalias() += scn.interferers_c[l].channel * draw.s_int_c[l];
    for (std::size_t l = 0; l < scn.interferers_cp.size(); ++l)
        pre_cp.noalias() += scn.interferers_cp[l].channel * draw.s_int_cp[l];
    pre_c += draw.noise_c;
    pre_cp += draw.noise_cp;

    const IqDiagPair rx_c = stack_iq_matrices(scn.rx_iq_c);
    const IqDiagPair rx_cp = stack_iq_matrices(scn.rx_iq_cp);
    Snapshot snap;
    snap.r_c = rx_c.k1.cwiseProduct(pre_c) +
               rx_c.k2.cwiseProduct(pre_cp.conjugate());
    snap.r_cp = rx_cp.k1.cwiseProduct(pre_cp) +
                rx_cp.k2.cwiseProduct(pre_c.conjugate());
    snap.x_streams_c = draw.x_c;
    snap.x_streams_cp = draw.x_cp;
    return snap;
}

Snapshot rx_snapshot(const SubcarrierScenario& scn, SymbolKind kind,
                     rng::Xoshiro256pp& g) {
    return assemble_snapshot(scn, draw_snapshot_inputs(scn, kind, g));
}

AugmentedSnapshot augment(const Snapshot& snap) {
    AugmentedSnapshot out;
    out.r_aug.resize(snap.r_c.size() + snap.r_cp.size());
    out.r_aug.head(snap.r_c.size()) = snap.r_c;
    out.r_aug.tail(snap.r_cp.size()) = snap.r_cp.conjugate();
    return out;
}

} // namespace iqmimo
