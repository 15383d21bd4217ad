#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tvcm/graph.hpp"
#include "tvcm/rng.hpp"

using namespace tvcm;

namespace {

LatentTrajectory constant_paths(int m, int T) {
  LatentTrajectory tr;
  for (int t = 0; t < T; ++t) {
    tr.B.push_back(MatrixXd::Zero(m, m));
    tr.h.push_back(VectorXd::Zero(m));
  }
  return tr;
}

CausalGraph graph_from(int m, std::initializer_list<std::tuple<int, int, double>> edges) {
  CausalGraph g = CausalGraph::empty(m);
  for (auto [a, b, s] : edges) {
    g.instantaneous(a, b) = 1;
    g.edge_scores(a, b) = s;
  }
  return g;
}

}  // namespace

TEST(Scad, HandValues) {
  EXPECT_DOUBLE_EQ(scad(0.05, 0.1, 3.7), 0.005);
  EXPECT_NEAR(scad(0.2, 0.1, 3.7), -(0.04 - 2 * 3.7 * 0.1 * 0.2 + 0.01) / (2 * 2.7), 1e-15);
  EXPECT_NEAR(scad(1.0, 0.1, 3.7), 4.7 * 0.01 / 2, 1e-15);
  EXPECT_EQ(scad(-0.3, 0.1, 3.7), scad(0.3, 0.1, 3.7));
  EXPECT_EQ(scad(5.0, 0.0, 3.7), 0.0);
}

TEST(Scad, ContinuousAtBreakpoints) {
  for (double lambda : {0.01, 0.1, 1.0})
    for (double a : {2.5, 3.7, 10.0}) {
      for (double knot : {lambda, a * lambda}) {
        const double lo = scad(knot * (1 - 1e-13), lambda, a);
        const double hi = scad(knot * (1 + 1e-13), lambda, a);
        EXPECT_NEAR(lo, hi, 1e-12) << "lambda=" << lambda << " a=" << a << " knot=" << knot;
      }
    }
}

TEST(Scad, NonDecreasingInMagnitude) {
  double prev = -1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double v = scad(k * 0.001, 0.1, 3.7);
    EXPECT_GE(v, prev * (1 - 1e-15));
    prev = v;
  }
}

TEST(Scad, RejectsBadHyperparameters) {
  EXPECT_THROW(scad(1.0, 0.1, 2.0), Error);
  EXPECT_THROW(scad(1.0, -0.1, 3.7), Error);
}

TEST(DetermineGraph, ConstantBelowThresholdIsAbsent) {
  auto tr = constant_paths(2, 10);
  for (auto& B : tr.B) B(1, 0) = 0.04;
  const CausalGraph g = determine_graph(tr, 0.05);
  EXPECT_EQ(g.edge_count(), 0);
  EXPECT_NEAR(g.edge_scores(0, 1), 0.04, 1e-15);
}

TEST(DetermineGraph, ConstantAboveThresholdIsPresent) {
  auto tr = constant_paths(2, 10);
  for (auto& B : tr.B) B(1, 0) = -0.06;
  const CausalGraph g = determine_graph(tr, 0.05);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_FALSE(g.has_edge(1, 0));
}

TEST(DetermineGraph, ZeroMeanHighVarianceIsPresent) {
  auto tr = constant_paths(2, 100);
  for (int t = 0; t < 100; ++t) tr.B[t](0, 1) = (t % 2 ? 1.0 : -1.0);
  const CausalGraph g = determine_graph(tr, 0.05);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_NEAR(g.edge_scores(1, 0), 1.0, 1e-12);
}

TEST(DetermineGraph, LaggedPathsUseTheSameRule) {
  auto tr = constant_paths(2, 5);
  tr.C.resize(1);
  for (int t = 0; t < 5; ++t) {
    MatrixXd c = MatrixXd::Zero(2, 2);
    c(0, 0) = 0.5;
    c(1, 0) = 0.01;
    tr.C[0].push_back(c);
  }
  const CausalGraph g = determine_graph(tr, 0.05);
  ASSERT_EQ(g.lagged.size(), 1u);
  EXPECT_EQ(g.lagged[0](0, 0), 1);
  EXPECT_EQ(g.lagged[0](0, 1), 0);
}

TEST(DetermineGraph, EdgeSetShrinksAsThresholdGrows) {
  Rng rng(21);
  auto tr = constant_paths(6, 40);
  for (auto& B : tr.B)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (i != j) B(i, j) = 0.2 * standard_normal(rng) + (i + j) * 0.01;
  MatrixXi prev = determine_graph(tr, 1e-4).instantaneous;
  for (double th : {1e-3, 0.01, 0.03, 0.05, 0.1, 0.3, 1.0}) {
    const MatrixXi cur = determine_graph(tr, th).instantaneous;
    EXPECT_TRUE(((cur.array() <= prev.array())).all()) << "threshold " << th;
    prev = cur;
  }
}

TEST(DetermineGraph, RejectsBadInput) {
  EXPECT_THROW(determine_graph(constant_paths(2, 3), 0.0), Error);
  EXPECT_THROW(determine_graph(LatentTrajectory{}, 0.05), Error);
  auto tr = constant_paths(2, 3);
  tr.B[1](0, 1) = std::nan("");
  EXPECT_THROW(determine_graph(tr, 0.05), Error);
}

TEST(Acyclicity, TwoCycleDropsWeakerEdge) {
  std::vector<std::pair<int, int>> removed;
  const CausalGraph g = enforce_acyclicity(graph_from(2, {{0, 1, 0.3}, {1, 0, 0.1}}), &removed);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_FALSE(g.has_edge(1, 0));
  ASSERT_EQ(removed.size(), 1u);
  EXPECT_EQ(removed[0], std::make_pair(1, 0));
}

TEST(Acyclicity, ThreeCycleDropsWeakestEdge) {
  const CausalGraph g = enforce_acyclicity(graph_from(3, {{0, 1, 0.5}, {1, 2, 0.2}, {2, 0, 0.4}}));
  EXPECT_EQ(g.edge_count(), 2);
  EXPECT_FALSE(g.has_edge(1, 2));
}

TEST(Acyclicity, EdgesOffCyclesSurvive) {
  // 3 -> 0 has the lowest score but sits on no cycle.
  const CausalGraph g = enforce_acyclicity(graph_from(4, {{0, 1, 0.5}, {1, 0, 0.4}, {3, 0, 0.01}}));
  EXPECT_TRUE(g.has_edge(3, 0));
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_FALSE(g.has_edge(1, 0));
}

TEST(Acyclicity, AcyclicInputUnchanged) {
  const CausalGraph in = graph_from(3, {{0, 1, 0.5}, {0, 2, 0.2}, {1, 2, 0.4}});
  std::vector<std::pair<int, int>> removed;
  EXPECT_EQ(enforce_acyclicity(in, &removed).instantaneous, in.instantaneous);
  EXPECT_TRUE(removed.empty());
}

TEST(Acyclicity, RandomGraphsGiveAcyclicSubgraphs) {
  Rng rng(22);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 2 + rep % 6;
    CausalGraph g = CausalGraph::empty(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (a != b && uniform01(rng) < 0.5) {
          g.instantaneous(a, b) = 1;
          g.edge_scores(a, b) = uniform01(rng);
        }
    const CausalGraph out = enforce_acyclicity(g);
    EXPECT_TRUE(validate_acyclic(out.instantaneous));
    EXPECT_TRUE((out.instantaneous.array() <= g.instantaneous.array()).all());
  }
}

TEST(MarkovBlanket, CollectsParentsChildrenSpouses) {
  // 0 -> 2 <- 1, 2 -> 3, 4 -> 3
  const CausalGraph g = graph_from(5, {{0, 2, 1}, {1, 2, 1}, {2, 3, 1}, {4, 3, 1}});
  const MarkovBlanket mb = markov_blanket(g, 2);
  EXPECT_EQ(mb.parents, (std::vector<int>{0, 1}));
  EXPECT_EQ(mb.children, (std::vector<int>{3}));
  EXPECT_EQ(mb.spouses, (std::vector<int>{4}));
  EXPECT_EQ(mb.members(), (std::vector<int>{0, 1, 3, 4}));
  EXPECT_EQ(markov_blanket(g, 0).members(), (std::vector<int>{1, 2}));
}

TEST(MarkovBlanket, MembershipIsSymmetric) {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 6;
    CausalGraph g = CausalGraph::empty(m);
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (uniform01(rng) < 0.4) g.instantaneous(a, b) = 1;
    for (int i = 0; i < m; ++i)
      for (int k : markov_blanket(g, i).members()) {
        const auto back = markov_blanket(g, k).members();
        EXPECT_NE(std::find(back.begin(), back.end(), i), back.end());
      }
  }
}

TEST(MarkovBlanket, OutOfRangeThrows) { EXPECT_THROW(markov_blanket(CausalGraph::empty(2), 2), Error); }
