#pragma once

// Shared builders for the unit tests: small random scenarios assembled
// directly from the data model (bypassing the template layer on purpose, so
// template bugs cannot mask model bugs).

#include "iqmimo/rng.hpp"
#include "iqmimo/scenario.hpp"

#include <cstddef>

namespace iqmimo::testing {

inline CMat random_matrix(Eigen::Index rows, Eigen::Index cols,
                          rng::Xoshiro256pp& g) {
    CMat m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            m(r, c) = rng::circular_normal(g);
    return m;
}

struct ScenarioShape {
    Eigen::Index n_rx = 4;
    std::size_t n_users_c = 2;
    std::size_t n_users_cp = 2;
    Eigen::Index m_tx = 2;
    Eigen::Index q_streams = 2;
    std::size_t n_interferers = 1; // per subcarrier
    Eigen::Index interferer_antennas = 1;
    double stream_power = 2.0;
    double interferer_power = 3.0;
    double noise_power = 1.0;
    double irr_floor_db = 12.0;
};

inline UserConfig random_user(const ScenarioShape& s, rng::Xoshiro256pp& g) {
    UserConfig u;
    u.precoder = random_matrix(s.m_tx, s.q_streams, g);
    u.stream_power = s.stream_power;
    u.channel_c = random_matrix(s.n_rx, s.m_tx, g);
    u.channel_cp = random_matrix(s.n_rx, s.m_tx, g);
    for (Eigen::Index m = 0; m < s.m_tx; ++m) {
        u.tx_iq_c.push_back(sample_imbalance(s.irr_floor_db, IqSide::Tx, g));
        u.tx_iq_cp.push_back(sample_imbalance(s.irr_floor_db, IqSide::Tx, g));
    }
    return u;
}

inline SubcarrierScenario random_scenario(const ScenarioShape& s,
                                          rng::Xoshiro256pp& g) {
    SubcarrierScenario scn;
    scn.n_rx = s.n_rx;
    scn.noise_power = s.noise_power;
    for (std::size_t i = 0; i < s.n_users_c; ++i)
        scn.users_c.push_back(random_user(s, g));
    for (std::size_t i = 0; i < s.n_users_cp; ++i)
        scn.users_cp.push_back(random_user(s, g));
    for (std::size_t l = 0; l < s.n_interferers; ++l) {
        scn.interferers_c.push_back(
            {random_matrix(s.n_rx, s.interferer_antennas, g),
             s.interferer_power});
        scn.interferers_cp.push_back(
            {random_matrix(s.n_rx, s.interferer_antennas, g),
             s.interferer_power});
    }
    for (Eigen::Index n = 0; n < s.n_rx; ++n) {
        scn.rx_iq_c.push_back(sample_imbalance(s.irr_floor_db, IqSide::Rx, g));
        scn.rx_iq_cp.push_back(sample_imbalance(s.irr_floor_db, IqSide::Rx, g));
    }
    return scn;
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace iqmimo::testing
