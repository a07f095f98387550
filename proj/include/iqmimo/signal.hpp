#pragma once

// Snapshot generation. Signals are built through the physical chain (TX
// imbalance, propagation, superposition, RX imbalance) rather than through
// the effective channel matrices, so sample statistics provide an independent
// check of the covariance algebra.
//
// Draw order is pinned and mode-independent: users_c stream symbols (user by
// user), users_cp, interferers_c (interferer by interferer), interferers_cp,
// noise at c, noise at c'. Gaussian and 16-QAM symbols both consume two
// uniforms, so switching constellation or imbalance mode never shifts the
// stream.

#include "iqmimo/common.hpp"
#include "iqmimo/rng.hpp"
#include "iqmimo/scenario.hpp"

#include <vector>

namespace iqmimo {

enum class SymbolKind { Gaussian, Qam16 };

// Unit-average-energy symbol. Gaussian is circularly symmetric CN(0,1);
// Qam16 picks independent 4-level axes {+-1, +-3}/sqrt(10).
Complex draw_symbol(SymbolKind kind, rng::Xoshiro256pp& g);

// Minimum-distance decision onto the unit-energy 16-QAM grid.
Complex slice_qam16(Complex y);

// Everything random in one received snapshot, drawn once and reusable across
// imbalance modes and receivers (paired evaluation). Stream symbols are
// already scaled to their configured power; interferer symbols and noise
// likewise.
struct SnapshotDraw {
    std::vector<CVec> x_c;     // per users_c entry, length Q
    std::vector<CVec> x_cp;    // per users_cp entry
    std::vector<CVec> s_int_c; // per interferers_c entry, length J
    std::vector<CVec> s_int_cp;
    CVec noise_c;  // length N
    CVec noise_cp; // length N
};

SnapshotDraw draw_snapshot_inputs(const SubcarrierScenario& scn,
                                  SymbolKind kind, rng::Xoshiro256pp& g);

// TX front-end of one user entry for one symbol draw: the direct output on
// its data subcarrier and the conjugate-image leakage on the mirror
// subcarrier. A device occupying both subcarriers is represented as two
// paired entries, so each entry's data contributes exactly these two pieces;
// an entry with no mirror data has no further terms (no self cross-talk).
struct TxSnapshot {
    CVec x;       // drawn stream symbols, length Q, scaled
    CVec s_data;  // length M, output on the data subcarrier
    CVec s_image; // length M, image leakage on the mirror subcarrier
};

TxSnapshot tx_snapshot(const UserConfig& user, Subcarrier data_subcarrier,
                       SymbolKind kind, rng::Xoshiro256pp& g);

// External interference plus thermal noise on one subcarrier; draws its own
// interferer symbols and noise.
CVec interference_plus_noise(const SubcarrierScenario& scn, Subcarrier sc,
                             rng::Xoshiro256pp& g);

struct Snapshot {
    CVec r_c;  // length N
    CVec r_cp; // length N
    std::vector<CVec> x_streams_c;  // ground truth, per users_c entry
    std::vector<CVec> x_streams_cp; // per users_cp entry
};

// Deterministic assembly of a snapshot from given draws; all randomness lives
// in SnapshotDraw. rx_snapshot = draw + assemble.
Snapshot assemble_snapshot(const SubcarrierScenario& scn,
                           const SnapshotDraw& draw);

Snapshot rx_snapshot(const SubcarrierScenario& scn, SymbolKind kind,
                     rng::Xoshiro256pp& g);

// [r_c; conj(r_cp)].
struct AugmentedSnapshot {
    CVec r_aug; // length 2N
};

AugmentedSnapshot augment(const Snapshot& snap);

} // namespace iqmimo
