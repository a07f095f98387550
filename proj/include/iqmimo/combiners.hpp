#pragma once

// Receive combiners for the data streams on subcarrier c: per-subcarrier
// LMMSE (length-N weights on r_c), augmented LMMSE (length-2N weights on
// [r_c; conj(r_c')]), and MRC (matched to the effective channel of the
// desired stream only). LMMSE weights solve the Hermitian system R w = v
// through a cached factorization; no matrix is ever inverted explicitly.

#include "iqmimo/common.hpp"
#include "iqmimo/scenario.hpp"
#include "iqmimo/signal.hpp"
#include "iqmimo/workspace.hpp"

#include <vector>

namespace iqmimo {

enum class CombinerKind { Lmmse, AugmentedLmmse, Mrc };

struct StreamRef {
    std::size_t user = 0;     // index into users_c
    Eigen::Index stream = 0;  // 0 .. Q-1
};

struct CombinerWeights {
    CombinerKind kind = CombinerKind::Lmmse;
    // One weight vector per stream, user-major order over users_c; length N
    // for Lmmse/Mrc, 2N for AugmentedLmmse.
    std::vector<CVec> per_stream;
    std::vector<StreamRef> streams;
};

CombinerWeights lmmse_weights(Workspace& ws);
CombinerWeights augmented_lmmse_weights(Workspace& ws);
CombinerWeights mrc_weights(Workspace& ws);

CombinerWeights lmmse_weights(const SubcarrierScenario& scn);
CombinerWeights augmented_lmmse_weights(const SubcarrierScenario& scn);
CombinerWeights mrc_weights(const SubcarrierScenario& scn);

// y[s] = w_s^H r. The snapshot overload requires a linear-space kind, the
// augmented overload requires AugmentedLmmse; both throw on mismatch.
CVec combine(const CombinerWeights& weights, const Snapshot& snap);
CVec combine(const CombinerWeights& weights, const AugmentedSnapshot& snap);

// Cross-correlation v_q = E[r x_q^*] between the (possibly augmented)
// received vector and stream q of the given user: sigma_x^2 * Xi G e_q in
// the augmented space, sigma_x^2 * Psi G e_q in the linear space.
CVec stream_cross_correlation(const Workspace& ws, std::size_t user,
                              Eigen::Index stream, bool augmented);

// Mean squared error sigma_x^2 - 2 Re(w^H v) + w^H R w of one stream's
// weight vector, evaluated in the space matching the weights' kind.
double stream_mse(Workspace& ws, const CombinerWeights& weights,
                  std::size_t user, Eigen::Index stream);

// Complex combiner gain of each stream's own symbol, g_q = w_q^H v_q /
// sigma_x^2; dividing the combiner output by it removes the MMSE bias before
// symbol detection.
CVec combiner_bias_gains(const Workspace& ws, const CombinerWeights& weights);

} // namespace iqmimo
