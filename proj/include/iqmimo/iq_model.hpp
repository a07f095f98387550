#pragma once

// Per-branch I/Q imbalance model: gain/phase parameters, the derived direct
// and image coefficients K1/K2, image rejection ratio, and the IRR-constrained
// random parameter samplers.

#include "iqmimo/common.hpp"
#include "iqmimo/rng.hpp"

#include <span>
#include <vector>

namespace iqmimo {

enum class IqSide { Tx, Rx };

// Raw imbalance of one up/down-conversion branch on one subcarrier.
// gain > 0, phase in (-pi, pi]; (1, 0) is a perfectly matched branch.
struct IqBranchParams {
    double gain = 1.0;
    double phase = 0.0; // radians
    IqSide side = IqSide::Tx;
};

// Direct (k1) and image (k2) coefficients of one branch.
// Tx side: k1 + k2 = 1. Rx side: k1 + conj(k2) = 1.
struct IqCoeffPair {
    Complex k1{1.0, 0.0};
    Complex k2{0.0, 0.0};
};

// Tx: k1 = (1 + g e^{+j phi})/2, k2 = (1 - g e^{+j phi})/2.
// Rx: k1 = (1 + g e^{-j phi})/2, k2 = (1 - g e^{+j phi})/2.
// The Rx pair deliberately conjugates only k1's exponential; the asymmetry is
// part of the model definition, not an error.
IqCoeffPair iq_coeffs(const IqBranchParams& params);

// Image rejection ratio 10 log10(|k1|^2 / |k2|^2); +infinity when k2 == 0.
double irr_db(const IqCoeffPair& pair);

// Draws (phase, gain) such that the branch IRR is >= irr_min_db:
//   phase ~ U(-alpha, alpha), alpha = 2 arctan(10^{-irr_min/20})
//     (the phase at which IRR reaches irr_min when gain = 1);
//   gain  ~ U(g_min, g_max), the two roots of IRR(g, phase) = irr_min.
// Throws std::invalid_argument for irr_min_db <= 0. Consumes exactly two
// uniform draws.
IqBranchParams sample_imbalance(double irr_min_db, IqSide side,
                                rng::Xoshiro256pp& g);

// Draws a branch whose IRR equals irr_target_db exactly: phase as above, gain
// set to one of the two roots of the IRR quadratic, chosen with equal
// probability. Consumes exactly two uniform draws (same as sample_imbalance,
// so paired trials stay aligned when switching sampler).
IqBranchParams sample_fixed_irr(double irr_target_db, IqSide side,
                                rng::Xoshiro256pp& g);

// Diagonals of the stacked per-branch coefficient matrices K1 and K2. Only
// the diagonals are stored; apply with .asDiagonal() or cwise products.
struct IqDiagPair {
    CVec k1;
    CVec k2;
};

IqDiagPair stack_iq_matrices(std::span<const IqBranchParams> branches);

// A branch table with every entry perfect, as produced by the imbalance-mode
// substitutions (K1 = I, K2 = 0).
std::vector<IqBranchParams> perfect_branches(std::size_t n, IqSide side);

} // namespace iqmimo
