#include "iqmimo/iq_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iqmimo {

IqCoeffPair iq_coeffs(const IqBranchParams& params) {
    const Complex e_plus = std::polar(params.gain, params.phase);
    IqCoeffPair pair;
    if (params.side == IqSide::Tx) {
        pair.k1 = 0.5 * (1.0 + e_plus);
        pair.k2 = 0.5 * (1.0 - e_plus);
    } else {
        const Complex e_minus = std::polar(params.gain, -params.phase);
        pair.k1 = 0.5 * (1.0 + e_minus);
        pair.k2 = 0.5 * (1.0 - e_plus);
    }
    return pair;
}

double irr_db(const IqCoeffPair& pair) {
    const double p1 = std::norm(pair.k1);
    const double p2 = std::norm(pair.k2);
    if (p2 == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p1 / p2);
}

namespace {

// Half-width of the phase distribution: the phase at which IRR hits the
// target with gain 1 (IRR = cot^2(phase/2) there).
double phase_half_width(double irr_db_value) {
    return 2.0 * std::atan(std::pow(10.0, -irr_db_value / 20.0));
}

// Roots of IRR(g, phase) = irr: g^2 - 2 g beta + 1 = 0 with
// beta = |cos phase| (rho + 1)/(rho - 1), rho = 10^{irr/10}.
// Within |phase| < alpha, beta >= 1, so both roots are real, positive and
// reciprocal; numerical noise can push beta slightly below 1 at the edge.
std::pair<double, double> gain_roots(double irr_db_value, double phase) {
    const double rho = std::pow(10.0, irr_db_value / 10.0);
    const double beta =
        std::abs(std::cos(phase)) * (rho + 1.0) / (rho - 1.0);
    const double disc = std::max(beta * beta - 1.0, 0.0);
    const double root = std::sqrt(disc);
    return {beta - root, beta + root};
}

void require_positive_irr(double irr_db_value) {
    if (!(irr_db_value > 0.0))
        throw std::invalid_argument("IRR bound must be > 0 dB");
}

} // namespace

IqBranchParams sample_imbalance(double irr_min_db, IqSide side,
                                rng::Xoshiro256pp& g) {
    require_positive_irr(irr_min_db);
    const double alpha = phase_half_width(irr_min_db);
    IqBranchParams params;
    params.side = side;
    params.phase = rng::uniform(g, -alpha, alpha);
    const auto [g_min, g_max] = gain_roots(irr_min_db, params.phase);
    params.gain = rng::uniform(g, g_min, g_max);
    return params;
}

IqBranchParams sample_fixed_irr(double irr_target_db, IqSide side,
                                rng::Xoshiro256pp& g) {
    require_positive_irr(irr_target_db);
    const double alpha = phase_half_width(irr_target_db);
    IqBranchParams params;
    params.side = side;
    params.phase = rng::uniform(g, -alpha, alpha);
    const auto [g_min, g_max] = gain_roots(irr_target_db, params.phase);
    params.gain = rng::uniform_unit(g) < 0.5 ? g_min : g_max;
    return params;
}

IqDiagPair stack_iq_matrices(std::span<const IqBranchParams> branches) {
    if (branches.empty())
        throw std::invalid_argument("branch list must be nonempty");
    IqDiagPair diag;
    const auto n = static_cast<Eigen::Index>(branches.size());
    diag.k1.resize(n);
    diag.k2.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const IqCoeffPair pair = iq_coeffs(branches[static_cast<std::size_t>(i)]);
        diag.k1[i] = pair.k1;
        diag.k2[i] = pair.k2;
    }
    return diag;
}

std::vector<IqBranchParams> perfect_branches(std::size_t n, IqSide side) {
    return std::vector<IqBranchParams>(n, IqBranchParams{1.0, 0.0, side});
}

} // namespace iqmimo
