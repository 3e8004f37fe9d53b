#include "msim/rtm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "msim/linalg.hpp"
#include "msim/mstate.hpp"
#include "oracles.hpp"

using namespace msim;
using msim::testing::kron_oracle;
using msim::testing::matrix_near;
using msim::testing::TestRng;
using msim::testing::vector_near;
using namespace std::complex_literals;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent route to the interferometer output: nested-loop tensor products
// of the convention matrices, followed by an explicit A-port index remap.
CVecd rtm_state_oracle(double phi_s, double phi_a, double alpha) {
  CMatd bs(2, 2);
  bs << 1.0 / std::sqrt(2.0), 1.0i / std::sqrt(2.0), 1.0i / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CMatd ps_s = CMatd::Identity(2, 2), ps_a = CMatd::Identity(2, 2);
  ps_s(1, 1) = std::polar(1.0, phi_s);
  ps_a(1, 1) = std::polar(1.0, -phi_a);
  CVecd source = CVecd::Zero(4);
  source(0) = std::cos(alpha);
  source(3) = std::sin(alpha);
  const CVecd post = kron_oracle(bs, bs) * CVecd(kron_oracle(ps_s, ps_a) * source);
  CVecd swapped(4);
  swapped(0) = post(1);  // A detector indices exchanged
  swapped(1) = post(0);
  swapped(2) = post(3);
  swapped(3) = post(2);
  return swapped;
}

}  // namespace

TEST(BeamSplitter, SplitsSingleBeamWithReflectionPhase) {
  CVecd in(2), expected(2);
  in << 1.0, 0.0;
  expected << 1.0 / std::sqrt(2.0), 1.0i / std::sqrt(2.0);
  EXPECT_TRUE(vector_near(CVecd(beam_splitter() * in), expected, exact_tol));
}

TEST(BeamSplitter, IsUnitary) {
  const CMatd bs = beam_splitter();
  EXPECT_TRUE(matrix_near(CMatd(dagger(bs) * bs), CMatd::Identity(2, 2), exact_tol));
}

TEST(BeamSplitter, FiftyFiftyPortProbabilities) {
  CVecd in(2);
  in << 0.0, 1.0;
  const CVecd out = beam_splitter() * in;
  EXPECT_NEAR(std::norm(out(0)), 0.5, exact_tol);
  EXPECT_NEAR(std::norm(out(1)), 0.5, exact_tol);
}

TEST(PhaseShifter, ZeroPhaseIsIdentity) {
  EXPECT_TRUE(matrix_near(phase_shifter(0.0), CMatd::Identity(2, 2), 0.0));
}

TEST(PhaseShifter, PiPhaseFlipsSecondBeam) {
  CMatd expected = CMatd::Identity(2, 2);
  expected(1, 1) = -1.0;
  EXPECT_TRUE(matrix_near(phase_shifter(kPi), expected, exact_tol));
}

TEST(PhaseShifter, QuarterTurnOnBalancedBeam) {
  CVecd in(2), expected(2);
  in << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  expected << 1.0 / std::sqrt(2.0), 1.0i / std::sqrt(2.0);
  EXPECT_TRUE(vector_near(CVecd(phase_shifter(kPi / 2) * in), expected, exact_tol));
}

TEST(PhaseShifter, RejectsNonFiniteAngle) {
  EXPECT_THROW(phase_shifter(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST(RtmState, MatchesIndependentRouteAtZeroPhase) {
  const StateVec out = rtm_state({0.0, 0.0, kPi / 4});
  EXPECT_TRUE(vector_near(out.amplitudes, rtm_state_oracle(0.0, 0.0, kPi / 4), exact_tol));
  const JointDistribution jd = joint_probs(out);
  EXPECT_NEAR(jd.p.sum(), 1.0, exact_tol);
}

TEST(RtmState, MatchesIndependentRouteOnRandomConfigs) {
  TestRng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const double phi_s = (rng.uniform() - 0.5) * 8 * kPi;
    const double phi_a = (rng.uniform() - 0.5) * 8 * kPi;
    const double alpha = rng.uniform() * kPi / 2;
    EXPECT_TRUE(vector_near(rtm_state({phi_s, phi_a, alpha}).amplitudes,
                            rtm_state_oracle(phi_s, phi_a, alpha), exact_tol));
  }
}

TEST(RtmState, PreSplitterStateCarriesTheRelativePhase) {
  for (double common : {0.3, 1.7, 4.0}) {
    const StateVec shifted = rtm_pre_splitter_state({common + 1.1, common, kPi / 3});
    const StateVec reference = build_ms({kPi / 3, 1.1});
    EXPECT_TRUE(vector_near(shifted.amplitudes, reference.amplitudes, exact_tol));
  }
}

TEST(RtmState, OnlyThePhaseDifferenceMatters) {
  TestRng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const double phi_s = rng.uniform() * 2 * kPi;
    const double phi_a = rng.uniform() * 2 * kPi;
    const double offset = (rng.uniform() - 0.5) * 4 * kPi;
    const JointDistribution base = joint_probs(rtm_state({phi_s, phi_a, kPi / 4}));
    const JointDistribution moved =
        joint_probs(rtm_state({phi_s + offset, phi_a + offset, kPi / 4}));
    EXPECT_LT((base.p - moved.p).cwiseAbs().maxCoeff(), exact_tol);
  }
}

TEST(RtmState, ProductSourceFactorizes) {
  const JointDistribution jd = joint_probs(rtm_state({0.9, 0.2, 0.0}));
  const auto [s1, s2] = marginals(rtm_state({0.9, 0.2, 0.0}), Subsystem::S);
  const auto [a1, a2] = marginals(rtm_state({0.9, 0.2, 0.0}), Subsystem::A);
  EXPECT_NEAR(jd.p(0, 0), s1 * a1, exact_tol);
  EXPECT_NEAR(jd.p(0, 1), s1 * a2, exact_tol);
  EXPECT_NEAR(jd.p(1, 0), s2 * a1, exact_tol);
  EXPECT_NEAR(jd.p(1, 1), s2 * a2, exact_tol);
}

TEST(RtmState, AlwaysNormalized) {
  TestRng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const StateVec out = rtm_state(
        {(rng.uniform() - 0.5) * 20, (rng.uniform() - 0.5) * 20, rng.uniform() * kPi / 2});
    EXPECT_NEAR(out.amplitudes.squaredNorm(), 1.0, exact_tol);
  }
}

TEST(RtmState, PreSplitterReductionsAreIncoherentMixtures) {
  for (double alpha : {kPi / 8, kPi / 4, kPi / 3}) {
    for (double phi_s : {0.0, 0.8, 2.9}) {
      const DensityOp rho = density(rtm_pre_splitter_state({phi_s, 0.4, alpha}));
      for (Subsystem side : {Subsystem::S, Subsystem::A}) {
        const CoherenceWitness w = coherence_witness(partial_trace(rho, side));
        EXPECT_LT(std::abs(w.q), exact_tol);
        EXPECT_LT(std::abs(w.p), exact_tol);
      }
    }
  }
}

TEST(JointProbs, BasisStateIsDeterministic) {
  CVecd e(4);
  e << 1.0, 0.0, 0.0, 0.0;
  const JointDistribution jd = joint_probs(make_state(std::move(e), detector_basis_labels));
  EXPECT_EQ(jd.p(0, 0), 1.0);
  EXPECT_EQ(jd.p(0, 1) + jd.p(1, 0) + jd.p(1, 1), 0.0);
}

TEST(JointProbs, ZeroPhaseGivesOnlyCoincidences) {
  const JointDistribution jd = joint_probs(rtm_state({0.0, 0.0, kPi / 4}));
  EXPECT_NEAR(jd.p(0, 0), 0.5, exact_tol);
  EXPECT_NEAR(jd.p(1, 1), 0.5, exact_tol);
  EXPECT_NEAR(jd.p(0, 1), 0.0, exact_tol);
  EXPECT_NEAR(jd.p(1, 0), 0.0, exact_tol);
}

TEST(JointProbs, PiPhaseGivesOnlyAntiCoincidences) {
  const JointDistribution jd = joint_probs(rtm_state({kPi, 0.0, kPi / 4}));
  EXPECT_NEAR(jd.p(0, 1), 0.5, exact_tol);
  EXPECT_NEAR(jd.p(1, 0), 0.5, exact_tol);
  EXPECT_NEAR(jd.p(0, 0), 0.0, exact_tol);
  EXPECT_NEAR(jd.p(1, 1), 0.0, exact_tol);
}

TEST(JointProbs, RejectsUnnormalizedInput) {
  StateVec v = rtm_state({0.0, 0.0, kPi / 4});
  v.amplitudes *= 2.0;
  EXPECT_THROW(joint_probs(v), std::invalid_argument);
}

TEST(JointProbs, EntriesNonnegativeAndSumToOne) {
  TestRng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const JointDistribution jd = joint_probs(rtm_state(
        {(rng.uniform() - 0.5) * 12, (rng.uniform() - 0.5) * 12, rng.uniform() * kPi / 2}));
    EXPECT_GE(jd.p.minCoeff(), 0.0);
    EXPECT_NEAR(jd.p.sum(), 1.0, exact_tol);
  }
}

TEST(CoincidenceProb, PaperAnchorsAndLawOnDenseGrid) {
  EXPECT_NEAR(coincidence_prob(0.0), 1.0, exact_tol);
  EXPECT_NEAR(coincidence_prob(kPi), 0.0, exact_tol);
  EXPECT_NEAR(coincidence_prob(kPi / 2), 0.5, exact_tol);
  for (int k = 0; k < 360; ++k) {
    const double phi = k * 2 * kPi / 360;
    EXPECT_NEAR(coincidence_prob(phi), (1.0 + std::cos(phi)) / 2.0, exact_tol);
  }
}

TEST(Marginals, FiftyFiftyRegardlessOfSettings) {
  for (double phi_s : {0.0, 0.5, 1.9, 4.4}) {
    for (double phi_a : {0.0, 2.2, 5.8}) {
      for (Subsystem side : {Subsystem::S, Subsystem::A}) {
        const auto [m1, m2] = marginals(rtm_state({phi_s, phi_a, kPi / 4}), side);
        EXPECT_NEAR(m1, 0.5, exact_tol);
        EXPECT_NEAR(m2, 0.5, exact_tol);
        EXPECT_NEAR(m1 + m2, 1.0, exact_tol);
      }
    }
  }
}

TEST(Marginals, SingleBeamStillSplitsFiftyFifty) {
  const auto [m1, m2] = marginals(rtm_state({0.0, 0.0, 0.0}), Subsystem::S);
  EXPECT_NEAR(m1, 0.5, exact_tol);
  EXPECT_NEAR(m2, 0.5, exact_tol);
}

TEST(NoSignalingScan, RemoteMarginalsAreFlat) {
  std::vector<double> grid;
  for (int k = 0; k < 64; ++k) grid.push_back(k * 2 * kPi / 64);
  EXPECT_LT(no_signaling_scan(grid, 0.7), exact_tol);
  EXPECT_LT(no_signaling_scan(grid, 0.7, Subsystem::A), exact_tol);  // roles swapped
}

TEST(NoSignalingScan, SingleElementGridHasZeroSpread) {
  EXPECT_EQ(no_signaling_scan({1.3}, 0.7), 0.0);
}

TEST(NoSignalingScan, RejectsEmptyGrid) {
  EXPECT_THROW(no_signaling_scan({}, 0.0), std::invalid_argument);
}

TEST(FringeToPhase, GridPositionsMapToCoincidencePeaks) {
  EXPECT_EQ(fringe_to_phase({2.5, 0.0}), 0.0);
  EXPECT_NEAR(fringe_to_phase({2.5, 1.25}), kPi, exact_tol);  // delta = L/2
  const double phi = fringe_to_phase({2.5, 5.0});             // delta = 2L
  EXPECT_NEAR(phi, 4 * kPi, exact_tol);
  EXPECT_NEAR(coincidence_prob(phi), 1.0, exact_tol);
}

TEST(FringeToPhase, RejectsNonpositiveFringeLength) {
  EXPECT_THROW(fringe_to_phase({0.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(fringe_to_phase({-1.0, 1.0}), std::invalid_argument);
}

TEST(SimulateCounts, DeterministicAtFullAndZeroCoincidence) {
  const CoincidenceCounts at_zero = simulate_counts({0.0, 0.0, kPi / 4}, 100000, 5);
  EXPECT_EQ(at_zero.n_coincidence, 100000);
  EXPECT_EQ(at_zero.n_anticoincidence, 0);

  const CoincidenceCounts at_pi = simulate_counts({kPi, 0.0, kPi / 4}, 100000, 5);
  EXPECT_EQ(at_pi.n_coincidence, 0);
  EXPECT_EQ(at_pi.n_anticoincidence, 100000);
}

TEST(SimulateCounts, BinomialBandAtQuarterTurn) {
  const std::int64_t n = 100000;
  const CoincidenceCounts counts = simulate_counts({kPi / 2, 0.0, kPi / 4}, n, 11);
  const double fraction = static_cast<double>(counts.n_coincidence) / static_cast<double>(n);
  const double sigma = std::sqrt(0.25 / static_cast<double>(n));
  EXPECT_NEAR(fraction, 0.5, 4.0 * sigma);
}

TEST(SimulateCounts, ReproducibleUnderFixedSeed) {
  const CoincidenceCounts a = simulate_counts({1.1, 0.3, kPi / 4}, 20000, 99);
  const CoincidenceCounts b = simulate_counts({1.1, 0.3, kPi / 4}, 20000, 99);
  EXPECT_EQ(a.n_coincidence, b.n_coincidence);
  EXPECT_EQ(a.n_coincidence + a.n_anticoincidence, a.n_trials);
}

TEST(SimulateCounts, RejectsZeroTrials) {
  EXPECT_THROW(simulate_counts({0.0, 0.0, kPi / 4}, 0, 1), std::invalid_argument);
}

TEST(RTMConfigValidation, RejectsBadAngles) {
  EXPECT_THROW(rtm_state({std::numeric_limits<double>::infinity(), 0.0, kPi / 4}),
               std::invalid_argument);
  EXPECT_THROW(rtm_state({0.0, 0.0, -0.1}), std::out_of_range);
  EXPECT_THROW(rtm_state({0.0, 0.0, 2.0}), std::out_of_range);
}
