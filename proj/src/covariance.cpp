#include "iqmimo/covariance.hpp"

#include <stdexcept>

namespace iqmimo {

namespace {

CMat interference_plus_noise_cov(const SubcarrierScenario& scn,
                                 Subcarrier sc) {
    const auto& interferers =
        sc == Subcarrier::C ? scn.interferers_c : scn.interferers_cp;
    CMat r = scn.noise_power *
             CMat::Identity(scn.n_rx, scn.n_rx);
    for (const auto& intf : interferers)
        r.noalias() += intf.power * (intf.channel * intf.channel.adjoint());
    return r;
}

// K R K^H for an augmented stack K = [diag(top); diag(bottom)]:
// 2x2 blocks of R conjugated by the stack diagonals.
CMat stack_sandwich(const RxStack& k, const CMat& r) {
    const Eigen::Index n = r.rows();
    CMat out(2 * n, 2 * n);
    out.topLeftCorner(n, n) =
        (k.top * k.top.adjoint()).cwiseProduct(r);
    out.topRightCorner(n, n) =
        (k.top * k.bottom.adjoint()).cwiseProduct(r);
    out.bottomLeftCorner(n, n) =
        (k.bottom * k.top.adjoint()).cwiseProduct(r);
    out.bottomRightCorner(n, n) =
        (k.bottom * k.bottom.adjoint()).cwiseProduct(r);
    return out;
}

} // namespace

CovariancePair covariance(const SubcarrierScenario& scn) {
    const Eigen::Index n = scn.n_rx;
    CovariancePair cov;
    cov.r_z_c = interference_plus_noise_cov(scn, Subcarrier::C);
    cov.r_z_cp = interference_plus_noise_cov(scn, Subcarrier::Cp);

    CMat r_aug = CMat::Zero(2 * n, 2 * n);
    for (std::size_t u = 0; u < scn.users_c.size(); ++u) {
        const auto eff = effective_channels(scn, u, UserRole::Direct);
        const CMat cols = eff.xi * scn.users_c[u].precoder;
        r_aug.noalias() +=
            scn.users_c[u].stream_power * (cols * cols.adjoint());
    }
    for (std::size_t v = 0; v < scn.users_cp.size(); ++v) {
        const auto eff = effective_channels(scn, v, UserRole::Mirror);
        const CMat cols = eff.phi * scn.users_cp[v].precoder.conjugate();
        r_aug.noalias() +=
            scn.users_cp[v].stream_power * (cols * cols.adjoint());
    }
    const auto [ka, kb] = rx_stacks(scn, Subcarrier::C);
    r_aug += stack_sandwich(ka, cov.r_z_c);
    r_aug += stack_sandwich(kb, cov.r_z_cp.conjugate());

    cov.r_aug = 0.5 * (r_aug + r_aug.adjoint());
    cov.r_lin = cov.r_aug.topLeftCorner(n, n);
    return cov;
}

FactoredCovariance factored_covariance(const SubcarrierScenario& scn,
                                       bool augmented) {
    std::vector<UserEffective> eff_c;
    eff_c.reserve(scn.users_c.size());
    for (std::size_t u = 0; u < scn.users_c.size(); ++u)
        eff_c.push_back(user_effective(scn, UserRole::Direct, u));
    std::vector<UserEffective> eff_cp;
    eff_cp.reserve(scn.users_cp.size());
    for (std::size_t v = 0; v < scn.users_cp.size(); ++v)
        eff_cp.push_back(user_effective(scn, UserRole::Mirror, v));
    const auto [ka, kb] = rx_stacks(scn, Subcarrier::C);
    return factored_covariance(scn, augmented, eff_c, eff_cp, ka, kb);
}

FactoredCovariance factored_covariance(const SubcarrierScenario& scn,
                                       bool augmented,
                                       const std::vector<UserEffective>& eff_c,
                                       const std::vector<UserEffective>& eff_cp,
                                       const RxStack& ka, const RxStack& kb) {
    const Eigen::Index n = scn.n_rx;

    Eigen::Index rank = 0;
    for (const auto& u : scn.users_c)
        rank += u.q_streams();
    for (const auto& v : scn.users_cp)
        rank += v.q_streams();
    for (const auto& i : scn.interferers_c)
        rank += i.n_antennas();
    for (const auto& i : scn.interferers_cp)
        rank += i.n_antennas();

    FactoredCovariance f;
    const Eigen::Index dim = augmented ? 2 * n : n;
    f.b.resize(dim, rank);
    f.powers.resize(rank);

    Eigen::Index col = 0;
    auto put = [&](const CMat& cols, double power) {
        f.b.middleCols(col, cols.cols()) = cols;
        f.powers.segment(col, cols.cols()).setConstant(power);
        col += cols.cols();
    };

    for (std::size_t u = 0; u < scn.users_c.size(); ++u) {
        const auto& eff = eff_c[u];
        const auto& g = scn.users_c[u].precoder;
        if (augmented) {
            CMat cols(dim, g.cols());
            cols.topRows(n).noalias() = eff.psi * g;
            cols.bottomRows(n).noalias() = eff.omega.conjugate() * g;
            put(cols, scn.users_c[u].stream_power);
        } else {
            put(eff.psi * g, scn.users_c[u].stream_power);
        }
    }
    for (std::size_t v = 0; v < scn.users_cp.size(); ++v) {
        const auto& eff = eff_cp[v];
        const CMat gc = scn.users_cp[v].precoder.conjugate();
        if (augmented) {
            CMat cols(dim, gc.cols());
            cols.topRows(n).noalias() = eff.omega * gc;
            cols.bottomRows(n).noalias() = eff.psi.conjugate() * gc;
            put(cols, scn.users_cp[v].stream_power);
        } else {
            put(eff.omega * gc, scn.users_cp[v].stream_power);
        }
    }
    for (const auto& intf : scn.interferers_c) {
        if (augmented) {
            CMat cols(dim, intf.n_antennas());
            cols.topRows(n) = ka.top.asDiagonal() * intf.channel;
            cols.bottomRows(n) = ka.bottom.asDiagonal() * intf.channel;
            put(cols, intf.power);
        } else {
            put(ka.top.asDiagonal() * intf.channel, intf.power);
        }
    }
    for (const auto& intf : scn.interferers_cp) {
        const CMat hc = intf.channel.conjugate();
        if (augmented) {
            CMat cols(dim, intf.n_antennas());
            cols.topRows(n) = kb.top.asDiagonal() * hc;
            cols.bottomRows(n) = kb.bottom.asDiagonal() * hc;
            put(cols, intf.power);
        } else {
            put(kb.top.asDiagonal() * hc, intf.power);
        }
    }

    const double sn = scn.noise_power;
    if (augmented) {
        f.d11 = sn * (ka.top.cwiseAbs2() + kb.top.cwiseAbs2());
        f.d22 = sn * (ka.bottom.cwiseAbs2() + kb.bottom.cwiseAbs2());
        f.d12 = sn * (ka.top.cwiseProduct(ka.bottom.conjugate()) +
                      kb.top.cwiseProduct(kb.bottom.conjugate()));
    } else {
        f.d11 = sn * (ka.top.cwiseAbs2() + kb.top.cwiseAbs2());
    }
    return f;
}

CMat FactoredCovariance::dense() const {
    const Eigen::Index n = d11.size();
    CMat r = CMat::Zero(dim(), dim());
    r.topLeftCorner(n, n).diagonal() = d11.cast<Complex>();
    if (d22.size() > 0) {
        r.bottomRightCorner(n, n).diagonal() = d22.cast<Complex>();
        r.topRightCorner(n, n).diagonal() = d12;
        r.bottomLeftCorner(n, n).diagonal() = d12.conjugate();
    }
    r.noalias() += b * powers.asDiagonal() * b.adjoint();
    return 0.5 * (r + r.adjoint());
}

CVec FactoredCovariance::multiply(const CVec& w) const {
    const Eigen::Index n = d11.size();
    CVec out(dim());
    if (d22.size() > 0) {
        out.head(n) = d11.cast<Complex>().cwiseProduct(w.head(n)) +
                      d12.cwiseProduct(w.tail(n));
        out.tail(n) = d22.cast<Complex>().cwiseProduct(w.tail(n)) +
                      d12.conjugate().cwiseProduct(w.head(n));
    } else {
        out = d11.cast<Complex>().cwiseProduct(w);
    }
    const CVec proj = b.adjoint() * w;
    out.noalias() += b * powers.cast<Complex>().cwiseProduct(proj);
    return out;
}

double FactoredCovariance::quad(const CVec& w) const {
    const Eigen::Index n = d11.size();
    double out = 0.0;
    if (d22.size() > 0) {
        out += d11.dot(w.head(n).cwiseAbs2());
        out += d22.dot(w.tail(n).cwiseAbs2());
        out += 2.0 * w.head(n)
                         .conjugate()
                         .cwiseProduct(d12)
                         .cwiseProduct(w.tail(n))
                         .sum()
                         .real();
    } else {
        out += d11.dot(w.cwiseAbs2());
    }
    const CVec proj = b.adjoint() * w;
    out += powers.dot(proj.cwiseAbs2());
    return out;
}

namespace {

bool prefer_lowrank(const FactoredCovariance& f) {
    // Dense LLT is cheap and most accurate at small size; Woodbury wins when
    // the rank is well below the dimension.
    return f.dim() >= 128 && 3 * f.rank() <= f.dim();
}

} // namespace

CovarianceSolver::CovarianceSolver(FactoredCovariance f, SolvePath path)
    : f_(std::move(f)), path_(path) {
    if (path_ == SolvePath::Auto)
        path_ = prefer_lowrank(f_) ? SolvePath::LowRank : SolvePath::Dense;

    if (path_ == SolvePath::LowRank) {
        // Guard: D must be comfortably invertible, else fall back to dense.
        bool ok = (f_.d11.array() > 0.0).all();
        if (ok && f_.d22.size() > 0) {
            const RVec det = f_.d11.cwiseProduct(f_.d22) - f_.d12.cwiseAbs2();
            ok = (det.array() >
                  1e-12 * f_.d11.cwiseProduct(f_.d22).array()).all();
        }
        if (ok) {
            dinv_b_ = apply_dinv(f_.b);
            CMat cap = f_.b.adjoint() * dinv_b_;
            cap.diagonal() += f_.powers.cwiseInverse().cast<Complex>();
            cap_ = Eigen::LLT<CMat>(cap);
            ok = cap_.info() == Eigen::Success;
            if (ok)
                rcond_ = cap_.rcond();
        }
        if (!ok)
            path_ = SolvePath::Dense;
    }
    if (path_ == SolvePath::Dense) {
        dense_ = f_.dense();
        llt_ = Eigen::LLT<CMat>(dense_);
        if (llt_.info() != Eigen::Success)
            throw std::runtime_error("covariance not positive definite");
        rcond_ = llt_.rcond();
    }
}

CVec CovarianceSolver::apply_dinv(const CVec& v) const {
    const Eigen::Index n = f_.d11.size();
    if (f_.d22.size() == 0)
        return v.cwiseQuotient(f_.d11.cast<Complex>());
    const RVec det = f_.d11.cwiseProduct(f_.d22) - f_.d12.cwiseAbs2();
    CVec out(2 * n);
    // Per-antenna inverse of [[d11, d12], [conj(d12), d22]].
    out.head(n) = (f_.d22.cast<Complex>().cwiseProduct(v.head(n)) -
                   f_.d12.cwiseProduct(v.tail(n)))
                      .cwiseQuotient(det.cast<Complex>());
    out.tail(n) = (f_.d11.cast<Complex>().cwiseProduct(v.tail(n)) -
                   f_.d12.conjugate().cwiseProduct(v.head(n)))
                      .cwiseQuotient(det.cast<Complex>());
    return out;
}

CMat CovarianceSolver::apply_dinv(const CMat& v) const {
    CMat out(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j)
        out.col(j) = apply_dinv(CVec(v.col(j)));
    return out;
}

CVec CovarianceSolver::solve_once(const CVec& rhs) const {
    if (path_ == SolvePath::Dense)
        return llt_.solve(rhs);
    const CVec dinv_rhs = apply_dinv(rhs);
    return dinv_rhs - dinv_b_ * cap_.solve(f_.b.adjoint() * dinv_rhs);
}

CVec CovarianceSolver::solve(const CVec& rhs) const {
    CVec w = solve_once(rhs);
    // One refinement pass against the factored operator tightens the
    // orthogonality residual to near machine precision.
    const CVec res = rhs - f_.multiply(w);
    w += solve_once(res);
    return w;
}

CMat CovarianceSolver::solve(const CMat& rhs) const {
    CMat out(rhs.rows(), rhs.cols());
    for (Eigen::Index j = 0; j < rhs.cols(); ++j)
        out.col(j) = solve(CVec(rhs.col(j)));
    return out;
}

} // namespace iqmimo
