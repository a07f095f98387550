#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iqmimo/signal.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace iqmimo;
using iqmimo::testing::max_abs_diff;
using iqmimo::testing::random_scenario;
using iqmimo::testing::ScenarioShape;

namespace {
constexpr double kStep = 0.31622776601683794; // 1/sqrt(10)
} // namespace

TEST_CASE("16-QAM symbols live on the unit-energy grid") {
    rng::Xoshiro256pp g(1);
    double energy = 0.0;
    bool saw_outer = false, saw_inner = false;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        const Complex x = draw_symbol(SymbolKind::Qam16, g);
        const double re = std::abs(x.real()) / kStep;
        const double im = std::abs(x.imag()) / kStep;
        CHECK((std::abs(re - 1.0) < 1e-12 || std::abs(re - 3.0) < 1e-12));
        CHECK((std::abs(im - 1.0) < 1e-12 || std::abs(im - 3.0) < 1e-12));
        energy += std::norm(x);
        saw_outer |= re > 2.0;
        saw_inner |= re < 2.0;
    }
    CHECK(energy / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(saw_outer);
    CHECK(saw_inner);
}

TEST_CASE("Gaussian symbols are circular with unit power") {
    rng::Xoshiro256pp g(2);
    Complex mean = 0.0, pseudo = 0.0;
    double power = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Complex x = draw_symbol(SymbolKind::Gaussian, g);
        mean += x;
        pseudo += x * x;
        power += std::norm(x);
    }
    CHECK(std::abs(mean) / n < 0.01);
    CHECK(std::abs(pseudo) / n < 0.01);
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("both symbol kinds consume exactly two uniforms") {
    rng::Xoshiro256pp a(3), b(3), c(3);
    (void)draw_symbol(SymbolKind::Gaussian, a);
    (void)draw_symbol(SymbolKind::Qam16, b);
    (void)rng::uniform_unit(c);
    (void)rng::uniform_unit(c);
    const auto ref = c();
    CHECK(a() == ref);
    CHECK(b() == ref);
}

TEST_CASE("slicer is exact on the grid and picks the nearest point off it") {
    for (double re : {-3.0, -1.0, 1.0, 3.0})
        for (double im : {-3.0, -1.0, 1.0, 3.0}) {
            const Complex pt{re * kStep, im * kStep};
            CHECK(slice_qam16(pt) == pt);
        }
    // Axis decision boundaries sit at 0 and +-2/sqrt(10).
    CHECK(slice_qam16({0.5, -0.7}) == Complex{kStep, -3.0 * kStep});
    CHECK(slice_qam16({0.64, 0.01}) == Complex{3.0 * kStep, kStep});
    CHECK(slice_qam16({-0.62, -0.1}) == Complex{-kStep, -kStep});
    CHECK(slice_qam16({5.0, -5.0}) == Complex{3.0 * kStep, -3.0 * kStep});
}

TEST_CASE("drawn stream symbols carry the configured power") {
    rng::Xoshiro256pp g(4);
    ScenarioShape shape;
    shape.stream_power = 5.0;
    const SubcarrierScenario scn = random_scenario(shape, g);
    double power = 0.0;
    int count = 0;
    for (int i = 0; i < 5000; ++i) {
        const SnapshotDraw d = draw_snapshot_inputs(scn, SymbolKind::Qam16, g);
        for (const CVec& x : d.x_c) {
            power += x.squaredNorm();
            count += static_cast<int>(x.size());
        }
    }
    CHECK(power / count == doctest::Approx(5.0).epsilon(0.03));
}

TEST_CASE("tx snapshot splits into direct and image parts") {
    rng::Xoshiro256pp g(5);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    const UserConfig& u = scn.users_c[0];
    const IqDiagPair tx_c = stack_iq_matrices(u.tx_iq_c);
    const IqDiagPair tx_cp = stack_iq_matrices(u.tx_iq_cp);

    const TxSnapshot snap = tx_snapshot(u, Subcarrier::C, SymbolKind::Gaussian, g);
    const CVec gx = u.precoder * snap.x;
    CHECK((snap.s_data - tx_c.k1.cwiseProduct(gx)).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((snap.s_image - tx_cp.k2.cwiseProduct(gx.conjugate()))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    // Perfect TX hardware sends the precoded symbols untouched, no image.
    UserConfig clean = u;
    clean.tx_iq_c = perfect_branches(static_cast<std::size_t>(u.m_tx()), IqSide::Tx);
    clean.tx_iq_cp = clean.tx_iq_c;
    const TxSnapshot ideal =
        tx_snapshot(clean, Subcarrier::C, SymbolKind::Gaussian, g);
    CHECK((ideal.s_data - clean.precoder * ideal.x).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK(ideal.s_image.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("received snapshot equals the effective-channel prediction") {
    // Noise-free single-user-per-subcarrier scenario: the physical chain
    // (TX imbalance -> propagation -> RX imbalance) must reproduce
    // psi G x + omega conj(G x) exactly, term by term.
    rng::Xoshiro256pp g(6);
    ScenarioShape shape;
    shape.n_users_c = 1;
    shape.n_users_cp = 1;
    shape.n_interferers = 0;
    const SubcarrierScenario scn = random_scenario(shape, g);

    SnapshotDraw draw = draw_snapshot_inputs(scn, SymbolKind::Gaussian, g);
    draw.noise_c.setZero();
    draw.noise_cp.setZero();
    const Snapshot snap = assemble_snapshot(scn, draw);

    const UserEffective dir = user_effective(scn, UserRole::Direct, 0);
    const UserEffective mir = user_effective(scn, UserRole::Mirror, 0);
    const CVec gx_c = scn.users_c[0].precoder * draw.x_c[0];
    const CVec gx_cp = scn.users_cp[0].precoder * draw.x_cp[0];

    const CVec r_c_pred = dir.psi * gx_c + mir.omega * gx_cp.conjugate();
    const CVec r_cp_pred = mir.psi * gx_cp + dir.omega * gx_c.conjugate();
    CHECK((snap.r_c - r_c_pred).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((snap.r_cp - r_cp_pred).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assembly is homogeneous in the drawn inputs") {
    rng::Xoshiro256pp g(7);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    const SnapshotDraw draw = draw_snapshot_inputs(scn, SymbolKind::Gaussian, g);

    SnapshotDraw doubled = draw;
    for (auto* list : {&doubled.x_c, &doubled.x_cp, &doubled.s_int_c,
                       &doubled.s_int_cp})
        for (CVec& v : *list) v *= 2.0;
    doubled.noise_c *= 2.0;
    doubled.noise_cp *= 2.0;

    const Snapshot a = assemble_snapshot(scn, draw);
    const Snapshot b = assemble_snapshot(scn, doubled);
    CHECK((b.r_c - 2.0 * a.r_c).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b.r_cp - 2.0 * a.r_cp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("draw stream does not depend on the imbalance tables") {
    rng::Xoshiro256pp g(8);
    const SubcarrierScenario full = random_scenario(ScenarioShape{}, g);
    const SubcarrierScenario none =
        apply_imbalance_mode(full, ImbalanceMode::None);

    rng::Xoshiro256pp g1(42), g2(42);
    const SnapshotDraw a = draw_snapshot_inputs(full, SymbolKind::Qam16, g1);
    const SnapshotDraw b = draw_snapshot_inputs(none, SymbolKind::Qam16, g2);
    CHECK(g1() == g2());
    for (std::size_t u = 0; u < a.x_c.size(); ++u)
        CHECK((a.x_c[u] - b.x_c[u]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.noise_cp - b.noise_cp).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("augmentation stacks the conjugated image on the bottom") {
    rng::Xoshiro256pp g(9);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    const Snapshot snap = rx_snapshot(scn, SymbolKind::Gaussian, g);
    const AugmentedSnapshot aug = augment(snap);
    REQUIRE(aug.r_aug.size() == 2 * scn.n_rx);
    CHECK((aug.r_aug.head(scn.n_rx) - snap.r_c).cwiseAbs().maxCoeff() == 0.0);
    CHECK((aug.r_aug.tail(scn.n_rx) - snap.r_cp.conjugate())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("rx_snapshot is draw + assemble with the same stream") {
    rng::Xoshiro256pp g(10);
    const SubcarrierScenario scn = random_scenario(ScenarioShape{}, g);
    rng::Xoshiro256pp g1(55), g2(55);
    const Snapshot a = rx_snapshot(scn, SymbolKind::Gaussian, g1);
    const Snapshot b =
        assemble_snapshot(scn, draw_snapshot_inputs(scn, SymbolKind::Gaussian, g2));
    CHECK((a.r_c - b.r_c).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.r_cp - b.r_cp).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g1() == g2());
}

TEST_CASE("tx second moments match the imbalance-shaped covariance") {
    rng::Xoshiro256pp g(11);
    ScenarioShape shape;
    shape.m_tx = 2;
    shape.q_streams = 2;
    const SubcarrierScenario scn = random_scenario(shape, g);
    const UserConfig& u = scn.users_c[1];
    const IqDiagPair tx_c = stack_iq_matrices(u.tx_iq_c);

    CMat acc = CMat::Zero(u.m_tx(), u.m_tx());
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const TxSnapshot s = tx_snapshot(u, Subcarrier::C, SymbolKind::Gaussian, g);
        acc.noalias() += s.s_data * s.s_data.adjoint();
    }
    acc /= static_cast<double>(n);
    const CMat ggh = u.precoder * u.precoder.adjoint();
    const CMat expected = u.stream_power * tx_c.k1.asDiagonal() * ggh *
                          tx_c.k1.conjugate().asDiagonal();
    CHECK(max_abs_diff(acc, expected) / expected.cwiseAbs().maxCoeff() < 0.06);
}
