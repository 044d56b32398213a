#include "fleet.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bmtrunc;
using fleet::mat;

TEST(MuRule, TableThenAffine) {
  const MuRule mu{{3.0, 1.0}, 2.0, 0.5};
  EXPECT_EQ(mu(0), 0.0);
  EXPECT_EQ(mu(1), 3.0);
  EXPECT_EQ(mu(2), 1.0);
  EXPECT_EQ(mu(3), 2.0 + 0.5 * 2);
  EXPECT_EQ(mu.rule_start(), 3);
  EXPECT_EQ(mu.inf_from(1), 1.0);
  EXPECT_EQ(mu.inf_from(3), 3.0);
}

TEST(BmapModel, ValidateRejectsDefects) {
  auto b = fleet::bmap_d2();
  b.D[1](0, 1) = -0.1;
  EXPECT_THROW(b.validate(), InvalidBmap);
  b = fleet::bmap_d2();
  b.D[0](0, 0) += 0.5;
  EXPECT_THROW(b.validate(), InvalidBmap);
  b = fleet::bmap_d2();
  b.psi = -1;
  EXPECT_THROW(b.validate(), InvalidBmap);
  // Reducible D: phase 1 never reaches phase 0.
  BmapModel r;
  r.d = 2;
  r.D = {mat({{-2, 1}, {0, -1}}), mat({{1, 0}, {0, 1}})};
  r.mu = MuRule::constant(3);
  EXPECT_THROW(r.validate(), InvalidBmap);
}

TEST(BmapQueue, ScalarPoissonIsMM1) {
  const auto q = build_generator(fleet::poisson_bmap(1.0, MuRule::constant(2.0)));
  const auto m = make_mm1(1.0, 2.0);
  for (Index k = 0; k <= 8; ++k)
    for (Index l = 0; l <= 9; ++l) {
      EXPECT_EQ(q->block(k, l), m->block(k, l)) << k << "," << l;
      EXPECT_NEAR((q->tail_sum(k, l) - m->tail_sum(k, l)).norm(), 0.0, 1e-15);
    }
}

TEST(BmapQueue, GeneratorIsConservativeAndTailSumsExact) {
  const auto q = build_generator(fleet::bmap_d2(0.5, MuRule{{1.0, 4.0}, 5.0, 0.25}));
  EXPECT_TRUE(validate_model(*q, 30).valid());
  for (Index k = 0; k <= 12; ++k)
    for (Index l = 0; l <= 16; ++l) {
      Matrix s = Matrix::Zero(2, 2);
      for (Index m = l; m <= k + 4; ++m) s += q->block(k, m);
      EXPECT_LE((s - q->tail_sum(k, l)).cwiseAbs().maxCoeff(), 1e-14) << k << "," << l;
    }
}

TEST(BmapQueue, ImpatienceModelIsBlockMonotone) {
  const auto q = build_generator(fleet::bmap_d2(0.0, MuRule{{}, 2.0, 0.7}));
  EXPECT_TRUE(generator_is_block_monotone(*q).holds);
}

TEST(BmapQueue, RandomModelsAreBlockMonotone) {
  std::mt19937 rng(99);
  for (int i = 0; i < 30; ++i) {
    const auto b = fleet::random_bmap(rng, 1 + i % 3, 1 + i % 4, (i % 2) * 0.3, MuRule{{}, 4.0, 0.1 * (i % 3)});
    const auto q = build_generator(b);
    EXPECT_TRUE(generator_is_block_monotone(*q).holds) << i;
    EXPECT_TRUE(generator_is_block_monotone(lc_truncate(q, 6).matrix).holds) << i;
  }
}

TEST(ArrivalRate, Examples) {
  EXPECT_NEAR(arrival_rate(fleet::poisson_bmap(1.7, MuRule::constant(3))), 1.7, 1e-14);
  BmapModel batch;
  batch.d = 1;
  batch.D = {mat({{-1.5}}), mat({{0.0}}), mat({{1.5}})};
  batch.mu = MuRule::constant(5);
  EXPECT_NEAR(arrival_rate(batch), 3.0, 1e-14);
}

TEST(ArrivalRate, MatchesDenseOracle) {
  const auto b = fleet::bmap_d2();
  const Vector eta = fleet::lu_stationary(b.total());
  Vector rate = Vector::Zero(2);
  for (Index k = 1; k <= b.k_max(); ++k) rate += static_cast<double>(k) * b.D[k].rowwise().sum();
  EXPECT_NEAR(arrival_rate(b), eta.dot(rate), 1e-13);
}

TEST(ArrivalRate, EqualsSlopeOfPerronRootAtOne) {
  std::mt19937 rng(4);
  for (int i = 0; i < 5; ++i) {
    const auto b = fleet::random_bmap(rng, 3, 3, 0.0, MuRule::constant(10));
    const double h = 1e-5;
    const double slope = (spectral(b, 1 + h).delta - spectral(b, 1 - h).delta) / (2 * h);
    EXPECT_NEAR(slope, arrival_rate(b), 1e-7 * arrival_rate(b)) << i;
  }
}

TEST(ArrivalRate, DegenerateWithoutArrivals) {
  BmapModel b;
  b.d = 2;
  b.D = {mat({{-1, 1}, {1, -1}}), Matrix::Zero(2, 2)};
  b.mu = MuRule::constant(1);
  EXPECT_THROW(arrival_rate(b), DegenerateArrivals);
}

TEST(Spectral, AtOneIsStationaryLawOfD) {
  const auto b = fleet::bmap_d2();
  const auto s = spectral(b, 1.0);
  EXPECT_NEAR(s.delta, 0.0, 1e-13);
  EXPECT_LE((s.u - Vector::Ones(2)).cwiseAbs().maxCoeff(), 1e-12);
  const Vector eta = fleet::lu_stationary(b.total());
  EXPECT_LE((s.eta.transpose() - eta).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Spectral, ScalarCaseIsTransform) {
  const auto b = fleet::poisson_bmap(1.0, MuRule::constant(2));
  for (double z : {0.5, 1.3, 4.0}) EXPECT_NEAR(spectral(b, z).delta, z - 1.0, 1e-13);
}

TEST(Spectral, EigenpairsAndResiduals) {
  std::mt19937 rng(17);
  for (int i = 0; i < 10; ++i) {
    const auto b = fleet::random_bmap(rng, 2 + i % 3, 3, 0.0, MuRule::constant(10));
    for (double z : {1.1, 2.0, 5.0}) {
      const auto s = spectral(b, z);
      EXPECT_LE(s.residual_right, 1e-12);
      EXPECT_LE(s.residual_left, 1e-12);
      EXPECT_GE(s.u.minCoeff(), 1.0 - 1e-15);
      EXPECT_NEAR(s.eta.dot(s.u.transpose()), 1.0, 1e-13);
      // The Perron root is the eigenvalue with the largest real part.
      const Eigen::VectorXcd ev = b.transform(z).eigenvalues();
      double top = -1e300;
      for (Index j = 0; j < ev.size(); ++j) top = std::max(top, ev(j).real());
      EXPECT_NEAR(s.delta, top, 1e-10 * std::max(1.0, std::abs(top)));
    }
  }
}

TEST(Spectral, LogConvexInLogZ) {
  const auto b = fleet::bmap_d2();
  for (double s0 : {-0.5, 0.0, 0.4, 1.2}) {
    const double h = 0.3;
    const double mid = spectral(b, std::exp(s0)).delta;
    const double lo = spectral(b, std::exp(s0 - h)).delta;
    const double hi = spectral(b, std::exp(s0 + h)).delta;
    EXPECT_LE(mid, 0.5 * (lo + hi) + 1e-12) << s0;
  }
}

TEST(NoDisaster, ConstantsAtSqrt2ForMM1) {
  const auto b = fleet::poisson_bmap(1.0, MuRule::constant(2.0));
  const auto nd = no_disaster_constants(b, std::sqrt(2.0));
  EXPECT_NEAR(nd.c, 3 - 2 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(nd.b, 2 - std::sqrt(2.0), 1e-14);
  const auto best = find_beta_no_disaster(b);
  EXPECT_NEAR(best.beta, std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(best.c, 3 - 2 * std::sqrt(2.0), 1e-11);
}

TEST(NoDisaster, CriticalLoadHasNoRate) {
  EXPECT_THROW(find_beta_no_disaster(fleet::poisson_bmap(1.0, MuRule::constant(1.0))), NoPositiveC);
  EXPECT_THROW(find_beta_no_disaster(fleet::bmap_d2(0.5)), InputError);
}

TEST(NoDisaster, CertificatePassesDriftCheck) {
  const auto b = fleet::bmap_d2();
  const auto nd = find_beta_no_disaster(b);
  EXPECT_GT(nd.c, 0.0);
  const auto q = build_generator(b);
  EXPECT_TRUE(drift_check(*q, {nd.beta, nd.spec.u, 0.0}, nd.c, nd.b, 0).verified);
}

TEST(Disaster, PureDisasterQueue) {
  // No service: only disasters empty the system. Stationary law is geometric.
  const double lambda = 1.0, psi = 1.0;
  const auto b = fleet::poisson_bmap(lambda, MuRule::constant(0.0), psi);
  const auto q = build_generator(b);
  const auto pi = stationary(lc_truncate(q, 80).matrix);
  const double r = lambda / (lambda + psi);
  for (Index k = 0; k <= 20; ++k) EXPECT_NEAR(pi.values(k), (1 - r) * std::pow(r, k), 1e-14);

  const auto res = bound_pipeline(b, {2, 5, 10, 20}, PipelineMode::Auto, std::nullopt, 200);
  EXPECT_EQ(res.mode, PipelineMode::Disaster);
  EXPECT_TRUE(res.certificate.verified);
  for (const auto& row : res.rows) {
    EXPECT_LE(*row.generic.true_tv, row.generic.bound_min) << row.generic.n;
    EXPECT_LE(row.cross_rel_error, 1e-9) << row.generic.n;
  }
}

TEST(Disaster, ConstantsSatisfyDriftAtK) {
  const auto b = fleet::bmap_d2(0.5);
  const auto dc = find_constants_disaster(b);
  EXPECT_GT(dc.c_prime, 0.0);
  EXPECT_GE(dc.b_prime, 0.0);
  const auto q = build_generator(b);
  EXPECT_TRUE(drift_check(*q, {dc.beta, dc.spec.u, 0.0}, dc.c_prime, dc.b_prime, dc.K).verified);
}

TEST(Disaster, RejectsZeroPsi) {
  EXPECT_THROW(find_constants_disaster(fleet::bmap_d2(0.0)), InputError);
}

TEST(Pipeline, ClosedFormsMatchGenericRoute) {
  for (double psi : {0.0, 0.5}) {
    const auto res = bound_pipeline(fleet::bmap_d2(psi), {1, 3, 10, 30});
    ASSERT_EQ(res.rows.size(), 4u);
    for (const auto& row : res.rows) {
      EXPECT_LE(row.cross_rel_error, 1e-9) << psi << " n=" << row.generic.n;
      EXPECT_GT(row.generic.bound_min, 0.0);
    }
    // Bounds fall with n.
    EXPECT_LT(res.rows.back().generic.bound_min, res.rows.front().generic.bound_min);
  }
  EXPECT_THROW(bound_pipeline(fleet::bmap_d2(0.0), {0}), InputError);
}

TEST(Pipeline, BoundsCoverTrueErrorsOnRandomModels) {
  std::mt19937 rng(123);
  for (int i = 0; i < 8; ++i) {
    const double psi = i % 2 ? 0.4 : 0.0;
    const auto b = fleet::random_bmap(rng, 2, 2, psi, MuRule::constant(8.0));
    const auto res = bound_pipeline(b, {5, 10, 20}, PipelineMode::Auto, std::nullopt, 150);
    for (const auto& row : res.rows) {
      EXPECT_LE(*row.generic.true_tv, row.generic.bound_min) << i << " n=" << row.generic.n;
      EXPECT_LE(row.cross_rel_error, 1e-9) << i;
    }
  }
}
