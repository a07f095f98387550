#include "iqmimo/combiners.hpp"

#include <stdexcept>

namespace iqmimo {

namespace {

std::vector<StreamRef> enumerate_streams(const SubcarrierScenario& scn) {
    std::vector<StreamRef> refs;
    for (std::size_t u = 0; u < scn.users_c.size(); ++u)
        for (Eigen::Index q = 0; q < scn.users_c[u].q_streams(); ++q)
            refs.push_back({u, q});
    return refs;
}

// sigma_x^2 * (effective channel) * G for one user, in the requested space.
CMat cross_correlation_block(const Workspace& ws, std::size_t user,
                             bool augmented) {
    const auto& cfg = ws.scn().users_c[user];
    const auto& eff = ws.eff_c()[user];
    if (!augmented)
        return cfg.stream_power * (eff.psi * cfg.precoder);
    const Eigen::Index n = ws.scn().n_rx;
    CMat v(2 * n, cfg.q_streams());
    v.topRows(n).noalias() = eff.psi * cfg.precoder;
    v.bottomRows(n).noalias() = eff.omega.conjugate() * cfg.precoder;
    return cfg.stream_power * v;
}

} // namespace

CombinerWeights lmmse_weights(Workspace& ws) {
    CombinerWeights w;
    w.kind = CombinerKind::Lmmse;
    w.streams = enumerate_streams(ws.scn());
    const auto& solver = ws.lin_solver();
    for (std::size_t u = 0; u < ws.scn().users_c.size(); ++u) {
        const CMat sols = solver.solve(cross_correlation_block(ws, u, false));
        for (Eigen::Index q = 0; q < sols.cols(); ++q)
            w.per_stream.emplace_back(sols.col(q));
    }
    return w;
}

CombinerWeights augmented_lmmse_weights(Workspace& ws) {
    CombinerWeights w;
    w.kind = CombinerKind::AugmentedLmmse;
    w.streams = enumerate_streams(ws.scn());
    const auto& solver = ws.aug_solver();
    for (std::size_t u = 0; u < ws.scn().users_c.size(); ++u) {
        const CMat sols = solver.solve(cross_correlation_block(ws, u, true));
        for (Eigen::Index q = 0; q < sols.cols(); ++q)
            w.per_stream.emplace_back(sols.col(q));
    }
    return w;
}

CombinerWeights mrc_weights(Workspace& ws) {
    CombinerWeights w;
    w.kind = CombinerKind::Mrc;
    w.streams = enumerate_streams(ws.scn());
    for (std::size_t u = 0; u < ws.scn().users_c.size(); ++u) {
        // Matched to the desired stream's own effective channel; deliberately
        // blind to every other user and to the interference structure.
        const CMat cols = ws.eff_c()[u].psi * ws.scn().users_c[u].precoder;
        for (Eigen::Index q = 0; q < cols.cols(); ++q)
            w.per_stream.emplace_back(cols.col(q));
    }
    return w;
}

CombinerWeights lmmse_weights(const SubcarrierScenario& scn) {
    Workspace ws(scn);
    return lmmse_weights(ws);
}

CombinerWeights augmented_lmmse_weights(const SubcarrierScenario& scn) {
    Workspace ws(scn);
    return augmented_lmmse_weights(ws);
}

CombinerWeights mrc_weights(const SubcarrierScenario& scn) {
    Workspace ws(scn);
    return mrc_weights(ws);
}

namespace {

CVec combine_with(const std::vector<CVec>& weights, const CVec& r) {
    CVec y(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t s = 0; s < weights.size(); ++s) {
        if (weights[s].size() != r.size())
            throw std::invalid_argument("combine: dimension mismatch");
        y[static_cast<Eigen::Index>(s)] = weights[s].dot(r); // w^H r
    }
    return y;
}

} // namespace

CVec combine(const CombinerWeights& weights, const Snapshot& snap) {
    if (weights.kind == CombinerKind::AugmentedLmmse)
        throw std::invalid_argument(
            "augmented weights need an augmented snapshot");
    return combine_with(weights.per_stream, snap.r_c);
}

CVec combine(const CombinerWeights& weights, const AugmentedSnapshot& snap) {
    if (weights.kind != CombinerKind::AugmentedLmmse)
        throw std::invalid_argument(
            "linear-space weights combine a plain snapshot");
    return combine_with(weights.per_stream, snap.r_aug);
}

CVec stream_cross_correlation(const Workspace& ws, std::size_t user,
                              Eigen::Index stream, bool augmented) {
    if (user >= ws.scn().users_c.size() || stream < 0 ||
        stream >= ws.scn().users_c[user].q_streams())
        throw std::out_of_range("unknown (user, stream)");
    return cross_correlation_block(ws, user, augmented).col(stream);
}

double stream_mse(Workspace& ws, const CombinerWeights& weights,
                  std::size_t user, Eigen::Index stream) {
    const bool augmented = weights.kind == CombinerKind::AugmentedLmmse;
    const Eigen::Index idx = ws.stream_index(user, stream);
    const CVec& w = weights.per_stream[static_cast<std::size_t>(idx)];
    const CVec v = stream_cross_correlation(ws, user, stream, augmented);
    const FactoredCovariance& cov = augmented ? ws.aug_cov() : ws.lin_cov();
    const double sigma2 = ws.scn().users_c[user].stream_power;
    return sigma2 - 2.0 * w.dot(v).real() + cov.quad(w);
}

CVec combiner_bias_gains(const Workspace& ws, const CombinerWeights& weights) {
    const bool augmented = weights.kind == CombinerKind::AugmentedLmmse;
    CVec gains(static_cast<Eigen::Index>(weights.per_stream.size()));
    for (std::size_t s = 0; s < weights.per_stream.size(); ++s) {
        const auto ref = weights.streams[s];
        const CVec v =
            stream_cross_correlation(ws, ref.user, ref.stream, augmented);
        const double sigma2 = ws.scn().users_c[ref.user].stream_power;
        gains[static_cast<Eigen::Index>(s)] =
            weights.per_stream[s].dot(v) / sigma2;
    }
    return gains;
}

} // namespace iqmimo
