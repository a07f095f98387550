#pragma once

// Per-scenario precomputation shared by the combiners and the analysis: the
// effective channels of every user, the RX imbalance stacks, and lazily built
// covariance factorizations/solvers. Read-only with respect to the scenario;
// one workspace serves all receivers evaluated on that scenario.

#include "iqmimo/covariance.hpp"
#include "iqmimo/scenario.hpp"

#include <optional>
#include <vector>

namespace iqmimo {

class Workspace {
public:
    explicit Workspace(const SubcarrierScenario& scn);

    const SubcarrierScenario& scn() const { return *scn_; }
    const std::vector<UserEffective>& eff_c() const { return eff_c_; }
    const std::vector<UserEffective>& eff_cp() const { return eff_cp_; }
    const RxStack& k_rx_a() const { return k_rx_a_; }
    const RxStack& k_rx_b() const { return k_rx_b_; }

    // Total stream count S over users_c and the flat index of one stream.
    Eigen::Index n_streams() const { return n_streams_; }
    Eigen::Index stream_index(std::size_t user, Eigen::Index stream) const;

    const FactoredCovariance& lin_cov();
    const FactoredCovariance& aug_cov();
    const CovarianceSolver& lin_solver();
    const CovarianceSolver& aug_solver();

private:
    const SubcarrierScenario* scn_;
    std::vector<UserEffective> eff_c_;
    std::vector<UserEffective> eff_cp_;
    RxStack k_rx_a_;
    RxStack k_rx_b_;
    Eigen::Index n_streams_ = 0;
    std::vector<Eigen::Index> stream_offsets_;
    std::optional<FactoredCovariance> lin_cov_;
    std::optional<FactoredCovariance> aug_cov_;
    std::optional<CovarianceSolver> lin_solver_;
    std::optional<CovarianceSolver> aug_solver_;
};

} // namespace iqmimo
