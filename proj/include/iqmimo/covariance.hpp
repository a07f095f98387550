#pragma once

// Analytic second-order statistics of the received signal, in two forms:
// dense matrices for small problems and tests, and a factored form
// R = D + B diag(p) B^H (diagonal-block noise part plus low-rank signal and
// interference columns) that scales to large receive arrays. The solver picks
// a Cholesky or Woodbury path depending on size, with one iterative
// refinement step either way.

#include "iqmimo/common.hpp"
#include "iqmimo/scenario.hpp"

namespace iqmimo {

struct CovariancePair {
    CMat r_lin;  // N x N, top-left quadrant of r_aug
    CMat r_aug;  // 2N x 2N
    CMat r_z_c;  // N x N interference-plus-noise at c
    CMat r_z_cp; // N x N at c'
};

// Dense augmented covariance at viewpoint c, per-user effective-channel
// terms plus the two RX-imbalance-mapped interference-plus-noise terms.
CovariancePair covariance(const SubcarrierScenario& scn);

// R = D + B diag(powers) B^H, Hermitian.
// D is diagonal for the linear space (d12 empty) and a 2x2 block of
// diagonals [[diag d11, diag d12], [diag conj(d12), diag d22]] for the
// augmented space; it carries the thermal-noise floor, so it is positive
// definite whenever noise power is positive.
struct FactoredCovariance {
    RVec d11;
    RVec d22;  // empty in the linear space
    CVec d12;  // empty in the linear space
    CMat b;    // dim x rank
    RVec powers;

    Eigen::Index dim() const { return d11.size() * (d22.size() > 0 ? 2 : 1); }
    Eigen::Index rank() const { return b.cols(); }

    CMat dense() const;
    CVec multiply(const CVec& w) const; // R w
    double quad(const CVec& w) const;   // Re(w^H R w)
};

FactoredCovariance factored_covariance(const SubcarrierScenario& scn,
                                       bool augmented);

// Same, reusing effective channels and RX stacks computed elsewhere.
FactoredCovariance factored_covariance(const SubcarrierScenario& scn,
                                       bool augmented,
                                       const std::vector<UserEffective>& eff_c,
                                       const std::vector<UserEffective>& eff_cp,
                                       const RxStack& ka, const RxStack& kb);

enum class SolvePath { Auto, Dense, LowRank };

// Hermitian positive definite solve with a cached factorization.
// Dense: LLT of the assembled matrix. LowRank: Woodbury identity around the
// diagonal-block inverse of D. Both finish with one refinement step against
// the factored operator.
class CovarianceSolver {
public:
    explicit CovarianceSolver(FactoredCovariance f,
                              SolvePath path = SolvePath::Auto);

    CVec solve(const CVec& rhs) const;
    CMat solve(const CMat& rhs) const;

    // Reciprocal condition estimate of the factored matrix (dense path) or a
    // conservative proxy from the capacitance factorization (low-rank path).
    double rcond() const { return rcond_; }
    SolvePath path() const { return path_; }
    const FactoredCovariance& factored() const { return f_; }

private:
    FactoredCovariance f_;
    SolvePath path_;
    double rcond_ = 1.0;
    // dense path
    CMat dense_;
    Eigen::LLT<CMat> llt_;
    // low-rank path
    CMat dinv_b_;           // D^{-1} B
    Eigen::LLT<CMat> cap_;  // diag(1/p) + B^H D^{-1} B

    CVec apply_dinv(const CVec& v) const;
    CMat apply_dinv(const CMat& v) const;
    CVec solve_once(const CVec& rhs) const;
};

} // namespace iqmimo
