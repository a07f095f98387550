#include "iqmimo/workspace.hpp"

#include <stdexcept>

namespace iqmimo {

Workspace::Workspace(const SubcarrierScenario& scn) : scn_(&scn) {
    eff_c_.reserve(scn.users_c.size());
    for (std::size_t u = 0; u < scn.users_c.size(); ++u)
        eff_c_.push_back(user_effective(scn, UserRole::Direct, u));
    eff_cp_.reserve(scn.users_cp.size());
    for (std::size_t v = 0; v < scn.users_cp.size(); ++v)
        eff_cp_.push_back(user_effective(scn, UserRole::Mirror, v));
    auto [a, b] = rx_stacks(scn, Subcarrier::C);
    k_rx_a_ = std::move(a);
    k_rx_b_ = std::move(b);
    stream_offsets_.reserve(scn.users_c.size());
    for (const auto& u : scn.users_c) {
        stream_offsets_.push_back(n_streams_);
        n_streams_ += u.q_streams();
    }
}

Eigen::Index Workspace::stream_index(std::size_t user,
                                     Eigen::Index stream) const {
    if (user >= stream_offsets_.size() ||
        stream >= scn_->users_c[user].q_streams() || stream < 0)
        throw std::out_of_range("unknown (user, stream)");
    return stream_offsets_[user] + stream;
}

const FactoredCovariance& Workspace::lin_cov() {
    if (!lin_cov_)
        lin_cov_ =
            factored_covariance(*scn_, false, eff_c_, eff_cp_, k_rx_a_, k_rx_b_);
    return *lin_cov_;
}

const FactoredCovariance& Workspace::aug_cov() {
    if (!aug_cov_)
        aug_cov_ =
            factored_covariance(*scn_, true, eff_c_, eff_cp_, k_rx_a_, k_rx_b_);
    return *aug_cov_;
}

const CovarianceSolver& Workspace::lin_solver() {
    if (!lin_solver_)
        lin_solver_.emplace(lin_cov());
    return *lin_solver_;
}

const CovarianceSolver& Workspace::aug_solver() {
    if (!aug_solver_)
        aug_solver_.emplace(aug_cov());
    return *aug_solver_;
}

} // namespace iqmimo
