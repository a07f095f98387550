#include "iqmimo/scenario.hpp"

#include <stdexcept>
#include <string>

namespace iqmimo {

namespace {

void check(bool ok, const std::string& what) {
    if (!ok)
        throw std::invalid_argument("scenario: " + what);
}

void validate_user(const UserConfig& u, Eigen::Index n_rx,
                   const std::string& label) {
    check(u.q_streams() >= 1, label + ": precoder needs at least one column");
    check(u.m_tx() >= u.q_streams(),
          label + ": more streams than TX antennas");
    check(u.precoder.colPivHouseholderQr().rank() == u.q_streams(),
          label + ": precoder is column-rank deficient");
    check(u.stream_power > 0.0, label + ": stream power must be positive");
    check(u.channel_c.rows() == n_rx && u.channel_c.cols() == u.m_tx(),
          label + ": channel_c shape mismatch");
    check(u.channel_cp.rows() == n_rx && u.channel_cp.cols() == u.m_tx(),
          label + ": channel_cp shape mismatch");
    check(static_cast<Eigen::Index>(u.tx_iq_c.size()) == u.m_tx(),
          label + ": tx_iq_c needs one entry per TX antenna");
    check(static_cast<Eigen::Index>(u.tx_iq_cp.size()) == u.m_tx(),
          label + ": tx_iq_cp needs one entry per TX antenna");
}

} // namespace

void validate(const SubcarrierScenario& scn) {
    check(scn.n_rx >= 1, "need at least one RX branch");
    check(scn.noise_power > 0.0, "noise power must be positive");
    check(static_cast<Eigen::Index>(scn.rx_iq_c.size()) == scn.n_rx,
          "rx_iq_c needs one entry per RX branch");
    check(static_cast<Eigen::Index>(scn.rx_iq_cp.size()) == scn.n_rx,
          "rx_iq_cp needs one entry per RX branch");
    for (std::size_t i = 0; i < scn.users_c.size(); ++i)
        validate_user(scn.users_c[i], scn.n_rx,
                      "users_c[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < scn.users_cp.size(); ++i)
        validate_user(scn.users_cp[i], scn.n_rx,
                      "users_cp[" + std::to_string(i) + "]");
    for (const auto* list : {&scn.interferers_c, &scn.interferers_cp})
        for (const auto& intf : *list) {
            check(intf.channel.rows() == scn.n_rx,
                  "interferer channel row count mismatch");
            check(intf.n_antennas() >= 1, "interferer needs antennas");
            check(intf.power > 0.0, "interferer power must be positive");
        }
    if (scn.mirror_aliasing) {
        check(scn.users_c.size() == scn.users_cp.size(),
              "aliased scenario needs paired user lists");
        for (std::size_t i = 0; i < scn.users_c.size(); ++i) {
            const auto& a = scn.users_c[i];
            const auto& b = scn.users_cp[i];
            check(a.channel_c == b.channel_c && a.channel_cp == b.channel_cp,
                  "aliased pair must share propagation channels");
        }
    }
}

namespace {

void make_perfect(std::vector<IqBranchParams>& table) {
    for (auto& p : table) {
        p.gain = 1.0;
        p.phase = 0.0;
    }
}

} // namespace

SubcarrierScenario apply_imbalance_mode(SubcarrierScenario scn,
                                        ImbalanceMode mode) {
    const bool kill_tx = mode == ImbalanceMode::None || mode == ImbalanceMode::RxOnly;
    const bool kill_rx = mode == ImbalanceMode::None || mode == ImbalanceMode::TxOnly;
    if (kill_tx)
        for (auto* list : {&scn.users_c, &scn.users_cp})
            for (auto& u : *list) {
                make_perfect(u.tx_iq_c);
                make_perfect(u.tx_iq_cp);
            }
    if (kill_rx) {
        make_perfect(scn.rx_iq_c);
        make_perfect(scn.rx_iq_cp);
    }
    return scn;
}

SubcarrierScenario swap_viewpoint(const SubcarrierScenario& scn) {
    SubcarrierScenario out;
    out.n_rx = scn.n_rx;
    out.noise_power = scn.noise_power;
    out.mirror_aliasing = scn.mirror_aliasing;
    out.users_c = scn.users_cp;
    out.users_cp = scn.users_c;
    for (auto* list : {&out.users_c, &out.users_cp})
        for (auto& u : *list) {
            std::swap(u.channel_c, u.channel_cp);
            std::swap(u.tx_iq_c, u.tx_iq_cp);
        }
    out.interferers_c = scn.interferers_cp;
    out.interferers_cp = scn.interferers_c;
    out.rx_iq_c = scn.rx_iq_cp;
    out.rx_iq_cp = scn.rx_iq_c;
    return out;
}

std::pair<RxStack, RxStack> rx_stacks(const SubcarrierScenario& scn,
                                      Subcarrier viewpoint) {
    const auto& here =
        viewpoint == Subcarrier::C ? scn.rx_iq_c : scn.rx_iq_cp;
    const auto& mirror =
        viewpoint == Subcarrier::C ? scn.rx_iq_cp : scn.rx_iq_c;
    const IqDiagPair d_here = stack_iq_matrices(here);
    const IqDiagPair d_mirror = stack_iq_matrices(mirror);
    RxStack a{d_here.k1, d_mirror.k2.conjugate()};
    RxStack b{d_here.k2, d_mirror.k1.conjugate()};
    return {std::move(a), std::move(b)};
}

UserEffective user_effective(const SubcarrierScenario& scn, UserRole role,
                             std::size_t index) {
    const auto& list = role == UserRole::Direct ? scn.users_c : scn.users_cp;
    if (index >= list.size())
        throw std::out_of_range("user index out of range");
    const UserConfig& u = list[index];

    // d = the user's data subcarrier, m = its mirror.
    const bool data_on_c = role == UserRole::Direct;
    const CMat& h_d = data_on_c ? u.channel_c : u.channel_cp;
    const CMat& h_m = data_on_c ? u.channel_cp : u.channel_c;
    const IqDiagPair tx_d = stack_iq_matrices(data_on_c ? u.tx_iq_c : u.tx_iq_cp);
    const IqDiagPair tx_m = stack_iq_matrices(data_on_c ? u.tx_iq_cp : u.tx_iq_c);
    const IqDiagPair rx_d =
        stack_iq_matrices(data_on_c ? scn.rx_iq_c : scn.rx_iq_cp);
    const IqDiagPair rx_m =
        stack_iq_matrices(data_on_c ? scn.rx_iq_cp : scn.rx_iq_c);

    UserEffective eff;
    // psi = K_Rx1,d H_d K_Tx1,d + K_Rx2,d conj(H_m) conj(K_Tx2,m)
    eff.psi = rx_d.k1.asDiagonal() * h_d * tx_d.k1.asDiagonal();
    eff.psi.noalias() +=
        rx_d.k2.asDiagonal() * h_m.conjugate() * tx_m.k2.conjugate().asDiagonal();
    // omega = K_Rx1,m H_m K_Tx2,m + K_Rx2,m conj(H_d) conj(K_Tx1,d)
    eff.omega = rx_m.k1.asDiagonal() * h_m * tx_m.k2.asDiagonal();
    eff.omega.noalias() +=
        rx_m.k2.asDiagonal() * h_d.conjugate() * tx_d.k1.conjugate().asDiagonal();
    return eff;
}

EffectiveChannels effective_channels(const SubcarrierScenario& scn,
                                     std::size_t user_index, UserRole role) {
    UserEffective eff = user_effective(scn, role, user_index);
    EffectiveChannels out;
    const Eigen::Index n = scn.n_rx;
    const Eigen::Index m = eff.psi.cols();
    out.xi.resize(2 * n, m);
    out.xi.topRows(n) = eff.psi;
    out.xi.bottomRows(n) = eff.omega.conjugate();
    out.phi.resize(2 * n, m);
    out.phi.topRows(n) = eff.omega;
    out.phi.bottomRows(n) = eff.psi.conjugate();
    out.psi = std::move(eff.psi);
    out.omega = std::move(eff.omega);
    auto [a, b] = rx_stacks(scn, Subcarrier::C);
    out.k_rx_a = std::move(a);
    out.k_rx_b = std::move(b);
    return out;
}

} // namespace iqmimo
