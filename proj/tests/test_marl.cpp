#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ma2c/marl.hpp"
#include "oracles.hpp"

namespace {

using namespace ma2c;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

TEST(Observation, ClipsOwnWaveToTwo) {
  const std::vector<VectorXd> waves{vec({17.5, 5.0, 0.0})};
  const std::vector<VectorXd> fp{vec({0.5, 0.5})};
  const auto obs = assemble_observation<double>(waves, fp, 0, {}, 0.9, 5.0);
  EXPECT_EQ(obs.own_wave, vec({2.0, 1.0, 0.0}));
  EXPECT_TRUE(obs.neighbor_waves.empty());
}

TEST(Observation, ScalesNeighborWavesByAlpha) {
  const std::vector<VectorXd> waves{vec({1.0}), vec({5.0, 20.0}), vec({2.5})};
  const std::vector<VectorXd> fp{vec({1.0, 0.0}), vec({0.3, 0.7}), vec({0.25, 0.75})};
  const std::vector<std::size_t> nb{1, 2};
  const auto obs = assemble_observation<double>(waves, fp, 0, nb, 0.9, 5.0);
  ASSERT_EQ(obs.neighbor_waves.size(), 2u);
  EXPECT_DOUBLE_EQ(obs.neighbor_waves[0](0), 0.9);
  EXPECT_DOUBLE_EQ(obs.neighbor_waves[0](1), 1.8);
  EXPECT_DOUBLE_EQ(obs.neighbor_waves[1](0), 0.45);
  EXPECT_EQ(obs.fingerprints[0], fp[1]);
  EXPECT_EQ(obs.fingerprints[1], fp[2]);
  EXPECT_EQ(obs.wave_input().size(), 4);
  EXPECT_EQ(obs.fingerprint_input(), vec({0.3, 0.7, 0.25, 0.75}));
}

TEST(Observation, AlphaZeroSilencesNeighbors) {
  const std::vector<VectorXd> waves{vec({3.0}), vec({8.0, 1.0})};
  const std::vector<VectorXd> fp{vec({0.5, 0.5}), vec({0.1, 0.9})};
  const std::vector<std::size_t> nb{1};
  const auto obs = assemble_observation<double>(waves, fp, 0, nb, 0.0, 5.0);
  EXPECT_TRUE(obs.neighbor_waves[0].isZero());
  EXPECT_EQ(obs.fingerprints[0], fp[1]);
}

TEST(Observation, RejectsMissingOrInvalidNeighborData) {
  const std::vector<VectorXd> waves{vec({1.0}), vec({1.0})};
  const std::vector<VectorXd> good{vec({0.5, 0.5}), vec({0.5, 0.5})};
  const std::vector<VectorXd> bad{vec({0.5, 0.5}), vec({0.5, 0.6})};
  const std::vector<std::size_t> missing{2}, one{1};
  EXPECT_THROW(assemble_observation<double>(waves, good, 0, missing, 0.9, 5.0), InvalidArgument);
  EXPECT_THROW(assemble_observation<double>(waves, bad, 0, one, 0.9, 5.0), InvalidArgument);
  EXPECT_THROW(assemble_observation<double>(waves, good, 0, one, 0.9, 0.0), InvalidArgument);
}

TEST(Observation, ComponentsStayInRangeOnRandomInputs) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> raw(0.0, 40.0), unit(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 5;
    std::vector<VectorXd> waves(n), fp(n);
    for (std::size_t a = 0; a < n; ++a) {
      waves[a] = VectorXd::NullaryExpr(4, [&] { return raw(rng); });
      fp[a] = VectorXd::NullaryExpr(3, [&] { return unit(rng) + 1e-3; });
      fp[a] /= fp[a].sum();
    }
    const double alpha = unit(rng);
    const std::vector<std::size_t> nb{1, 3, 4};
    const auto obs = assemble_observation<double>(waves, fp, 0, nb, alpha, 5.0);
    EXPECT_TRUE((obs.own_wave.array() >= 0.0).all() && (obs.own_wave.array() <= 2.0).all());
    for (const auto& w : obs.neighbor_waves) EXPECT_TRUE((w.array() >= 0.0).all() && (w.array() <= 2.0).all());
    for (const auto& f : obs.fingerprints) EXPECT_NEAR(f.sum(), 1.0, 1e-6);
  }
}

TEST(Reward, NormalizesAndClips) {
  EXPECT_EQ(local_reward(0.0, 20.0), 0.0);
  EXPECT_EQ(local_reward(100.0, 20.0), -2.0);
  EXPECT_DOUBLE_EQ(local_reward(26.0, 20.0), -1.3);
  EXPECT_THROW(local_reward(-1.0, 20.0), InvalidArgument);
  EXPECT_THROW(local_reward(1.0, 0.0), InvalidArgument);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> q(0.0, 500.0);
  for (int k = 0; k < 1000; ++k) {
    const double r = local_reward(q(rng), 20.0);
    EXPECT_GE(r, -2.0);
    EXPECT_LE(r, 2.0);
  }
}

TEST(SpatialDiscount, Examples) {
  EXPECT_EQ(spatial_discount<double>(-0.7, {}, 0.9), -0.7);
  const std::vector<double> one{-3.0};
  EXPECT_EQ(spatial_discount<double>(-1.0, one, 0.0), -0.5);
  const std::vector<double> two{-1.0, -1.0};
  EXPECT_NEAR(spatial_discount<double>(-1.0, two, 0.9), -2.8 / 3.0, 1e-15);
}

TEST(SpatialDiscount, MonotoneInEveryArgument) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> r(-2.0, 2.0), unit(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> nb(4);
    for (double& x : nb) x = r(rng);
    const double own = r(rng), alpha = unit(rng), bump = unit(rng) + 1e-3;
    const double base = spatial_discount<double>(own, nb, alpha);
    EXPECT_GT(spatial_discount<double>(own + bump, nb, alpha), base);
    for (std::size_t j = 0; j < nb.size(); ++j) {
      auto up = nb;
      up[j] += bump;
      EXPECT_GE(spatial_discount<double>(own, up, alpha), base);
    }
  }
}

TEST(Returns, Examples) {
  EXPECT_DOUBLE_EQ(n_step_returns<double>(vec({1.0}), 0.5, 0.99)(0), 1.495);
  EXPECT_EQ(n_step_returns<double>(vec({0.3, -1.0, 2.0}), 7.0, 0.0), vec({0.3, -1.0, 2.0}));
  EXPECT_THROW(n_step_returns<double>(VectorXd(), 0.0, 0.99), InvalidArgument);
}

TEST(Returns, SatisfyTheBackwardRecursion) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> r(-2.0, 2.0), unit(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index T = std::uniform_int_distribution<Eigen::Index>(1, 40)(rng);
    const VectorXd rewards = VectorXd::NullaryExpr(T, [&] { return r(rng); });
    const double gamma = unit(rng), boot = 10.0 * r(rng);
    const VectorXd R = n_step_returns<double>(rewards, boot, gamma);
    for (Eigen::Index t = 0; t < T; ++t) {
      const double next = t + 1 < T ? R(t + 1) : boot;
      EXPECT_NEAR(R(t), rewards(t) + gamma * next, 1e-12);
    }
  }
}

TEST(Advantage, Examples) {
  EXPECT_TRUE(advantage<double>(vec({1.0, 2.0}), vec({1.0, 2.0})).isZero());
  EXPECT_NEAR(advantage<double>(vec({1.495}), vec({1.0}))(0), 0.495, 1e-15);
  EXPECT_THROW(advantage<double>(vec({1.0, 2.0}), vec({1.0})), InvalidArgument);
}

TEST(ActorLoss, Examples) {
  const MatrixXd uniform = MatrixXd::Constant(2, 1, 0.5);
  // Only the entropy term remains: beta * sum p log p = -0.01 log 2.
  EXPECT_NEAR(actor_loss<double>(vec({std::log(0.5)}), vec({0.0}), uniform, 0.01), -0.01 * std::log(2.0), 1e-15);
  const MatrixXd one_hot = (MatrixXd(2, 1) << 1.0, 0.0).finished();
  EXPECT_EQ(actor_loss<double>(vec({0.0}), vec({0.0}), one_hot, 0.01), 0.0);
  EXPECT_DOUBLE_EQ(actor_loss<double>(vec({-0.5}), vec({2.0}), uniform, 0.0), 1.0);
  const MatrixXd unnormalized = (MatrixXd(2, 1) << 0.5, 0.6).finished();
  EXPECT_THROW(actor_loss<double>(vec({-0.5}), vec({2.0}), unnormalized, 0.01), InvalidArgument);
}

// Descending the actor loss along the entropy term must raise entropy.
TEST(ActorLoss, DescentOnEntropyTermRaisesEntropy) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.5);
  for (int k = 0; k < 200; ++k) {
    const VectorXd logits = VectorXd::NullaryExpr(4, [&] { return n(rng); });
    VectorXd pi = (logits.array() - logits.maxCoeff()).exp();
    pi /= pi.sum();
    const VectorXd g = actor_logit_gradient<double>(pi, 0, 0.0, 1.0);
    VectorXd moved = ((logits - 1e-3 * g).array() - logits.maxCoeff()).exp();
    moved /= moved.sum();
    EXPECT_LE(neg_entropy<double>(moved), neg_entropy<double>(pi) + 1e-15);
  }
}

TEST(ActorLoss, EntropyIsMaximalAtUniformAndZeroAtOneHot) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int U = 2; U <= 6; ++U) {
    const VectorXd uniform = VectorXd::Constant(U, 1.0 / U);
    VectorXd hot = VectorXd::Zero(U);
    hot(U - 1) = 1.0;
    EXPECT_EQ(neg_entropy<double>(hot), 0.0);
    for (int k = 0; k < 200; ++k) {
      VectorXd p = VectorXd::NullaryExpr(U, [&] { return unit(rng); });
      p /= p.sum();
      EXPECT_GE(neg_entropy<double>(p), neg_entropy<double>(uniform) - 1e-12);
      EXPECT_LE(neg_entropy<double>(p), 0.0);
    }
  }
}

TEST(ActorLoss, LogitGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const VectorXd z = VectorXd::NullaryExpr(3, [&] { return n(rng); });
    const std::size_t u = static_cast<std::size_t>(k % 3);
    const double adv = n(rng), beta = 0.05;
    auto loss = [&](const VectorXd& logits) {
      VectorXd p = (logits.array() - logits.maxCoeff()).exp();
      p /= p.sum();
      return actor_loss<double>(vec({std::log(p(static_cast<Eigen::Index>(u)))}), vec({adv}), p, beta);
    };
    VectorXd p = (z.array() - z.maxCoeff()).exp();
    p /= p.sum();
    const VectorXd g = actor_logit_gradient<double>(p, u, adv, beta);
    for (Eigen::Index i = 0; i < 3; ++i) {
      VectorXd hi = z, lo = z;
      hi(i) += 1e-6;
      lo(i) -= 1e-6;
      EXPECT_NEAR(g(i), (loss(hi) - loss(lo)) / 2e-6, 1e-7);
    }
  }
}

TEST(CriticLoss, Examples) {
  EXPECT_EQ(critic_loss<double>(vec({1.0, 2.0}), vec({1.0, 2.0})), 0.0);
  EXPECT_EQ(critic_loss<double>(vec({1.0, 2.0}), vec({0.0, 0.0})), 2.5);
  const VectorXd R = vec({0.4, -1.2, 3.0}), V = vec({1.0, 0.2, -0.5});
  EXPECT_NEAR(critic_loss<double>(V + 3.0 * (R - V), V), 9.0 * critic_loss<double>(R, V), 1e-12);
  EXPECT_THROW(critic_loss<double>(vec({1.0}), vec({1.0, 2.0})), InvalidArgument);
  EXPECT_DOUBLE_EQ(critic_value_gradient(1.0, 0.2, 0.5), -0.4);
}

TEST(TotalLoss, Examples) {
  EXPECT_EQ(total_loss(1.5, 0.0, 0.5), 1.5);
  EXPECT_EQ(total_loss(1.0, 2.0, 0.5), 2.0);
  EXPECT_EQ(total_loss(1.0, 2.0, 0.0), 1.0);
}

TEST(Oracles, LibraryMatchesBruteForceOnRandomInstances) {
  const oracle::SweepResult res = oracle::sweep(2000, 77);
  EXPECT_LT(res.spatial_discount, 1e-10);
  EXPECT_LT(res.n_step_returns, 1e-10);
  EXPECT_LT(res.advantage, 1e-10);
  EXPECT_LT(res.actor_loss, 1e-10);
  EXPECT_LT(res.critic_loss, 1e-10);
}

// With alpha = 0 each learner sees only its own lanes and r_i / |V_i|.
TEST(Degeneracy, AlphaZeroGivesIndependentLearners) {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> raw(0.0, 20.0), r(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<VectorXd> waves(3), fp(3, vec({0.5, 0.5}));
    for (auto& w : waves) w = VectorXd::NullaryExpr(2, [&] { return raw(rng); });
    const std::vector<std::size_t> nb{0, 2};
    const auto coupled = assemble_observation<double>(waves, fp, 1, nb, 0.0, 5.0);
    const auto alone = assemble_observation<double>(waves, fp, 1, {}, 0.0, 5.0);
    EXPECT_EQ(coupled.own_wave, alone.own_wave);
    for (const auto& w : coupled.neighbor_waves) EXPECT_TRUE(w.isZero());
    const double own = r(rng);
    const std::vector<double> nr{r(rng), r(rng)};
    EXPECT_DOUBLE_EQ(spatial_discount<double>(own, nr, 0.0), own / 3.0);
  }
}

TEST(HyperParams, DefaultsAndValidation) {
  const HyperParams hp;
  EXPECT_EQ(hp.alpha, 0.9);
  EXPECT_EQ(hp.gamma, 0.99);
  EXPECT_EQ(hp.beta, 0.01);
  EXPECT_EQ(hp.xi_critic, 0.5);
  EXPECT_EQ(hp.eta_actor, 5e-4);
  EXPECT_EQ(hp.eta_critic, 2.5e-4);
  EXPECT_EQ(hp.batch_size, 40);
  EXPECT_EQ(hp.delta_t, 5);
  EXPECT_EQ(hp.t_yellow, 2.0);
  EXPECT_EQ(hp.episode_seconds, 3600);
  EXPECT_EQ(hp.steps_per_episode(), 720);
  EXPECT_NO_THROW(hp.validate());
  HyperParams bad = hp;
  bad.gamma = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = hp;
  bad.alpha = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = hp;
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Templates, FloatInstantiation) {
  const Eigen::VectorXf R = n_step_returns<float>(Eigen::VectorXf::Constant(3, 1.0f), 0.0f, 0.5f);
  EXPECT_FLOAT_EQ(R(0), 1.75f);
  EXPECT_FLOAT_EQ(critic_loss<float>(R, Eigen::VectorXf::Zero(3)), 0.5f * (1.75f * 1.75f + 1.5f * 1.5f + 1.0f));
}

}  // namespace
