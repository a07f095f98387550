#pragma once

// Mirror-subcarrier scenario description and effective channel construction.
//
// Every quantity lives on one of two coupled subcarriers: the reference c and
// its image c'. Users in users_c carry data on c, users in users_cp on c'.
// I/Q imbalance makes each user's signal appear on both: directly on its data
// subcarrier (psi) and conjugated on the mirror (omega).

#include "iqmimo/common.hpp"
#include "iqmimo/iq_model.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace iqmimo {

enum class Subcarrier { C, Cp };
enum class ImbalanceMode { None, TxOnly, RxOnly, TxRx };

// One user terminal. The precoder maps its q_streams() data streams onto its
// m_tx() antennas at the user's data subcarrier; channels and TX imbalance
// tables exist for both subcarriers because the hardware leaks across them.
struct UserConfig {
    CMat precoder;             // M x Q
    double stream_power = 1.0; // per-stream variance, linear
    CMat channel_c;            // N x M, propagation at c
    CMat channel_cp;           // N x M, propagation at c'
    std::vector<IqBranchParams> tx_iq_c;  // M entries
    std::vector<IqBranchParams> tx_iq_cp; // M entries

    Eigen::Index m_tx() const { return precoder.rows(); }
    Eigen::Index q_streams() const { return precoder.cols(); }
};

// One external interferer: J antennas, i.i.d. circular symbols of the given
// per-antenna power, no imbalance model of its own (post-FFT Gaussian).
struct InterfererConfig {
    CMat channel; // N x J
    double power = 1.0;

    Eigen::Index n_antennas() const { return channel.cols(); }
};

struct SubcarrierScenario {
    Eigen::Index n_rx = 0;
    std::vector<UserConfig> users_c;  // data on c
    std::vector<UserConfig> users_cp; // data on c'
    std::vector<InterfererConfig> interferers_c;
    std::vector<InterfererConfig> interferers_cp;
    double noise_power = 1.0; // per-branch variance
    std::vector<IqBranchParams> rx_iq_c;  // N entries
    std::vector<IqBranchParams> rx_iq_cp; // N entries
    // True when users_c[i] and users_cp[i] are the same physical device
    // occupying both subcarriers (paired entries share channels and TX
    // hardware tables). Signal and covariance algebra need no special case;
    // the flag drives scenario generation and bookkeeping.
    bool mirror_aliasing = false;
};

// Throws std::invalid_argument on shape or positivity violations.
void validate(const SubcarrierScenario& scn);

// Forces the disabled side(s) to perfect branches: None zeroes both image
// paths (K1 = I, K2 = 0 everywhere), TxOnly keeps only TX imbalance, RxOnly
// only RX imbalance, TxRx returns the scenario unchanged.
SubcarrierScenario apply_imbalance_mode(SubcarrierScenario scn,
                                        ImbalanceMode mode);

// The same scenario seen from the image subcarrier: c and c' swap roles.
SubcarrierScenario swap_viewpoint(const SubcarrierScenario& scn);

// Which list a user index refers to.
enum class UserRole { Direct, Mirror }; // Direct -> users_c, Mirror -> users_cp

// Augmented RX imbalance stack [diag(top); diag(bottom)], a 2N x N matrix
// stored as its two diagonals.
struct RxStack {
    CVec top;
    CVec bottom;
};

// The two augmented RX stacks at the given viewpoint v (image subcarrier v'):
//   first  = [diag(K_Rx1,v); diag(conj(K_Rx2,v'))]  (multiplies z_v)
//   second = [diag(K_Rx2,v); diag(conj(K_Rx1,v'))]  (multiplies conj(z_v'))
std::pair<RxStack, RxStack> rx_stacks(const SubcarrierScenario& scn,
                                      Subcarrier viewpoint);

// Effective channels of one user, all relative to ITS data subcarrier d
// (mirror m = the other one):
//   psi   N x M   arrival of its data on d
//   omega N x M   conjugate-image arrival of its data on m
//   xi   2N x M   [psi; conj(omega)], augmented arrival at viewpoint d
//   phi  2N x M   [omega; conj(psi)], augmented arrival at viewpoint m
// k_rx_a / k_rx_b are the viewpoint-c stacks (user independent).
struct EffectiveChannels {
    CMat psi;
    CMat omega;
    CMat xi;
    CMat phi;
    RxStack k_rx_a;
    RxStack k_rx_b;
};

// psi and omega only; the cheap core used by covariance/combiner paths.
struct UserEffective {
    CMat psi;
    CMat omega;
};

UserEffective user_effective(const SubcarrierScenario& scn, UserRole role,
                             std::size_t index);

EffectiveChannels effective_channels(const SubcarrierScenario& scn,
                                     std::size_t user_index, UserRole role);

} // namespace iqmimo
