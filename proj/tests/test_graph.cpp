#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "asd/errors.hpp"
#include "asd/graph.hpp"

using namespace asd;

namespace {

NodeStatistics single_class(std::vector<std::tuple<int, int, double>> dk) {
  std::vector<StatCell> cells;
  for (auto [d, k, p] : dk) cells.push_back({DegreeVector{d}, DegreeVector{k}, 0, p});
  return NodeStatistics(LabelSet{}, cells);
}

std::int64_t edges_between(const LabeledGraph& g, std::size_t a, std::size_t b) {
  std::int64_t c = 0;
  for (NodeId v = 0; v < g.n(); ++v) {
    if (g.label_of(v) != a) continue;
    for (NodeId w : g.out_edges(v))
      if (g.label_of(w) == b) ++c;
  }
  return c;
}

}  // namespace

TEST(LabelSet, IndexIsPositionAndNamesAreUnique) {
  LabelSet l{"x", "y", "z"};
  EXPECT_EQ(l.index("z"), 2u);
  EXPECT_TRUE(l.contains("y"));
  EXPECT_FALSE(l.contains("w"));
  EXPECT_THROW(LabelSet({"x", "x"}), std::invalid_argument);
  EXPECT_EQ(LabelSet{}.size(), 1u);
}

TEST(DegreeVector, TotalAndNegativeEntries) {
  DegreeVector d{1, 0, 4};
  EXPECT_EQ(d.total(), 5);
  EXPECT_THROW(DegreeVector({1, -1}), std::invalid_argument);
}

TEST(ConfigurationModel, RegularDegreeTwoOnFiveNodes) {
  auto g = sample_configuration_model(single_class({{2, 2, 1.0}}), 5, 7);
  EXPECT_EQ(g.edge_count(), 10);
  for (NodeId v = 0; v < 5; ++v) {
    EXPECT_EQ(g.out_total(v), 2);
    EXPECT_EQ(g.in_total(v), 2);
  }
}

TEST(ConfigurationModel, ZeroDegreeMassGivesEmptyGraph) {
  auto g = sample_configuration_model(single_class({{0, 0, 1.0}}), 50, 1);
  EXPECT_EQ(g.n(), 50);
  EXPECT_EQ(g.edge_count(), 0);
}

TEST(ConfigurationModel, EdgeCountInvariants) {
  auto g = sample_cbm({300, 200}, {{4, 2}, {3, 5}}, 500, 11);
  std::int64_t out_sum = 0, in_sum = 0;
  for (NodeId v = 0; v < g.n(); ++v) {
    out_sum += static_cast<std::int64_t>(g.out_edges(v).size());
    in_sum += g.in_degree_vec(v).total();
  }
  EXPECT_EQ(out_sum, g.edge_count());
  EXPECT_EQ(in_sum, g.edge_count());
  auto cls = g.class_edge_counts();
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      std::int64_t from_in = 0;
      for (NodeId v = 0; v < g.n(); ++v)
        if (g.label_of(v) == b) from_in += g.in_degree(v)[a];
      EXPECT_EQ(cls[a * 2 + b], edges_between(g, a, b));
      EXPECT_EQ(cls[a * 2 + b], from_in);
    }
}

TEST(ConfigurationModel, DegreeExactnessUnderLargestRemainderRounding) {
  // 1000/3 per cell: the first cell in stable order takes the extra node.
  auto stats = single_class({{1, 1, 1.0 / 3}, {2, 2, 1.0 / 3}, {3, 3, 1.0 / 3}});
  auto g = sample_configuration_model(stats, 1000, 3);
  std::map<int, int> hist;
  for (NodeId v = 0; v < g.n(); ++v) {
    ASSERT_EQ(g.in_total(v), g.out_total(v));
    ++hist[g.out_total(v)];
  }
  EXPECT_EQ(hist[1], 334);
  EXPECT_EQ(hist[2], 333);
  EXPECT_EQ(hist[3], 333);
}

TEST(ConfigurationModel, MatchingIsUniformOverPermutations) {
  auto stats = single_class({{1, 1, 1.0}});
  const int R = 10000;
  std::map<std::vector<NodeId>, int> freq;
  for (int r = 0; r < R; ++r) {
    auto g = sample_configuration_model(stats, 4, static_cast<std::uint64_t>(r));
    // Nodes are interchangeable; identify the matching by the head of each tail in node order.
    std::vector<NodeId> perm;
    for (NodeId v = 0; v < 4; ++v) perm.push_back(g.out_edges(v)[0]);
    ++freq[perm];
  }
  EXPECT_EQ(freq.size(), 24u);
  const double p = 1.0 / 24, sigma = std::sqrt(R * p * (1 - p));
  for (const auto& [perm, c] : freq) EXPECT_NEAR(c, R * p, 5 * sigma);
}

TEST(ConfigurationModel, ExtractionRecoversHistogram) {
  std::vector<StatCell> cells{
      {DegreeVector{1, 0}, DegreeVector{0, 2}, 0, 0.25},
      {DegreeVector{1, 1}, DegreeVector{2, 1}, 0, 0.25},
      {DegreeVector{2, 0}, DegreeVector{1, 0}, 1, 0.25},
      {DegreeVector{1, 1}, DegreeVector{0, 1}, 1, 0.25},
  };
  NodeStatistics stats(LabelSet{"a", "b"}, cells);
  const NodeId n = 2000;
  auto g = sample_configuration_model(stats, n, 5);
  auto back = extract_statistics(g);
  std::map<std::tuple<std::size_t, DegreeVector, DegreeVector>, double> want, got;
  for (const auto& c : stats.cells()) want[{c.label, c.d, c.k}] += c.prob;
  for (const auto& c : back.cells()) got[{c.label, c.d, c.k}] += c.prob;
  ASSERT_EQ(want.size(), got.size());
  for (const auto& [key, p] : want) EXPECT_LE(std::abs(got[key] - p), 1.0 / n);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      EXPECT_NEAR(back.edge_density(a, b) * n, static_cast<double>(edges_between(g, a, b)), 1e-6);
}

TEST(ConfigurationModel, RoundTripPreservesDegreeMultiset) {
  auto g = sample_cbm({400, 600}, {{3, 1}, {2, 4}}, 1000, 21);
  auto g2 = sample_configuration_model(extract_statistics(g), g.n(), 99);
  auto key = [](const LabeledGraph& h) {
    std::vector<std::tuple<std::size_t, DegreeVector, DegreeVector>> out;
    for (NodeId v = 0; v < h.n(); ++v) out.emplace_back(h.label_of(v), h.in_degree_vec(v), h.out_degree_vec(v));
    std::sort(out.begin(), out.end());
    return out;
  };
  EXPECT_EQ(key(g), key(g2));
}

TEST(NodeStatistics, RejectsImproperInput) {
  EXPECT_THROW(single_class({{1, 1, 0.5}}), InvalidDistribution);
  EXPECT_THROW(single_class({{1, 1, 0.5}, {2, 2, 0.4}}), InvalidDistribution);
  EXPECT_THROW(single_class({{0, 1, 1.0}}), UnbalancedStatistics);
}

TEST(NodeStatistics, EdgeDensityFromInAndOutSidesAgree) {
  auto g = sample_cbm({300, 300}, {{5, 2}, {1, 3}}, 600, 8);
  auto s = extract_statistics(g);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      double in_side = 0.0;
      for (const auto& c : s.cells())
        if (c.label == b) in_side += c.d[a] * c.prob;
      EXPECT_NEAR(s.edge_density(a, b), in_side, 1e-12);
    }
}

TEST(NodeStatistics, RegularGraphIsPointMass) {
  auto s = extract_statistics(sample_regular(4, 100, 1));
  ASSERT_EQ(s.cells().size(), 1u);
  EXPECT_EQ(s.cells()[0].d, DegreeVector{4});
  EXPECT_EQ(s.cells()[0].k, DegreeVector{4});
  EXPECT_DOUBLE_EQ(s.cells()[0].prob, 1.0);
  auto q = s.q_k(0, 0);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].k, DegreeVector{4});
  EXPECT_DOUBLE_EQ(q[0].prob, 1.0);
}

TEST(NodeStatistics, SingleEdgeHandCount) {
  std::istringstream in("0 1\n");
  auto s = extract_statistics(load_edge_list(in).graph);
  std::map<std::pair<int, int>, double> p;
  for (const auto& c : s.cells()) p[{c.d[0], c.k[0]}] += c.prob;
  EXPECT_DOUBLE_EQ((p[{0, 1}]), 0.5);
  EXPECT_DOUBLE_EQ((p[{1, 0}]), 0.5);
  auto q = s.q_dk(0, 0);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].d, DegreeVector{1});
  EXPECT_EQ(q[0].k, DegreeVector{0});
  EXPECT_DOUBLE_EQ(q[0].prob, 1.0);
}

TEST(NodeStatistics, QWeightsByParentInDegree) {
  // Child cells (d=1,k=1) and (d=3,k=3) with equal p: q puts 1/4 and 3/4.
  auto s = single_class({{1, 1, 0.5}, {3, 3, 0.5}});
  auto q = s.q_k(0, 0);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_NEAR(q[0].prob, 0.25, 1e-15);
  EXPECT_NEAR(q[1].prob, 0.75, 1e-15);
  EXPECT_NEAR(s.mean_degree(), 2.0, 1e-15);
}

TEST(NodeStatistics, JsonRoundTrip) {
  auto s = extract_statistics(sample_cbm({20, 30}, {{2, 1}, {1, 2}}, 50, 4))
               .with_initial_states({"-1", "1"}, {{0.2, 0.8}, {0.5, 0.5}});
  auto r = NodeStatistics::from_json(s.to_json());
  EXPECT_EQ(r.labels(), s.labels());
  EXPECT_EQ(r.states(), s.states());
  EXPECT_EQ(r.p_s_given_a(), s.p_s_given_a());
  ASSERT_EQ(r.cells().size(), s.cells().size());
  for (std::size_t i = 0; i < r.cells().size(); ++i) {
    EXPECT_EQ(r.cells()[i].d, s.cells()[i].d);
    EXPECT_EQ(r.cells()[i].k, s.cells()[i].k);
    EXPECT_EQ(r.cells()[i].prob, s.cells()[i].prob);
  }
  EXPECT_THROW(NodeStatistics::from_json("{not json"), ParseError);
}

TEST(RegularStatistics, MultinomialLabelMix) {
  auto s = regular_statistics(3, {0.5, 0.5});
  EXPECT_NEAR(s.p_label(0), 0.5, 1e-15);
  EXPECT_NEAR(s.edge_density(0, 1), 0.75, 1e-15);
  auto k = s.k_given_a(0);
  ASSERT_EQ(k.size(), 4u);
  // (0,3),(1,2),(2,1),(3,0) sorted by total then lexicographically.
  EXPECT_EQ(k[0].k, (DegreeVector{0, 3}));
  EXPECT_NEAR(k[0].prob, 0.125, 1e-15);
  EXPECT_NEAR(k[1].prob, 0.375, 1e-15);
}

TEST(Cbm, EmptyAndBlockDiagonal) {
  EXPECT_EQ(sample_cbm({100}, {{0.0}}, 100, 1).edge_count(), 0);
  auto g = sample_cbm({500, 500}, {{4, 0}, {0, 4}}, 1000, 2);
  EXPECT_EQ(edges_between(g, 0, 1), 0);
  EXPECT_EQ(edges_between(g, 1, 0), 0);
  EXPECT_GT(edges_between(g, 0, 0), 0);
}

TEST(Cbm, MeanCrossDegreesMatchTargets) {
  const NodeId n = 10000;
  auto g = sample_cbm({n / 2, n / 2}, {{20, 6}, {5, 20}}, n, 17);
  const double half = n / 2.0;
  EXPECT_NEAR(edges_between(g, 0, 0) / half, 20.0, 0.1);
  EXPECT_NEAR(edges_between(g, 0, 1) / half, 6.0, 0.1);
  EXPECT_NEAR(edges_between(g, 1, 0) / half, 5.0, 0.1);
  EXPECT_NEAR(edges_between(g, 1, 1) / half, 20.0, 0.1);
  EXPECT_NEAR((edges_between(g, 0, 0) + edges_between(g, 0, 1)) / half, 26.0, 0.5);
  EXPECT_NEAR((edges_between(g, 1, 0) + edges_between(g, 1, 1)) / half, 25.0, 0.5);
}

TEST(Regular, DegreesAreExact) {
  EXPECT_EQ(sample_regular(0, 10, 1).edge_count(), 0);
  auto g = sample_regular(21, 100000, 3);
  for (NodeId v = 0; v < g.n(); ++v) {
    ASSERT_EQ(g.out_total(v), 21);
    ASSERT_EQ(g.in_total(v), 21);
  }
  auto p = sample_regular(1, 2, 5);
  EXPECT_EQ(p.in_total(0), 1);
  EXPECT_EQ(p.in_total(1), 1);
}

TEST(PowerLaw, Preconditions) {
  EXPECT_THROW(sample_powerlaw_sequence({1.7, 100, {}, {}}, 10, 1), InvalidSpec);
  EXPECT_THROW(sample_powerlaw_sequence({2.5, 0, {}, {}}, 10, 1), InvalidSpec);
  auto one = sample_powerlaw_sequence({3.0, 1, {}, {}}, 100, 1);
  for (auto k : one.out_degree) EXPECT_EQ(k, 1);
  auto checked = sample_powerlaw_sequence({3.0, 10, 0.2, 0.3}, 10, 1);
  EXPECT_TRUE(checked.regime_checked);
  EXPECT_TRUE(checked.regime_ok);
  EXPECT_FALSE(sample_powerlaw_sequence({3.0, 10, 0.2, 0.45}, 10, 1).regime_ok);
}

TEST(PowerLaw, EmpiricalMeanMatchesTruncatedLaw) {
  double z = 0, m1 = 0, m2 = 0;
  for (int k = 1; k <= 100; ++k) {
    double w = 1.0 / (double(k) * k * k);
    z += w;
    m1 += k * w;
    m2 += double(k) * k * w;
  }
  m1 /= z;
  m2 /= z;
  const NodeId n = 100000;
  auto seq = sample_powerlaw_sequence({3.0, 100, {}, {}}, n, 12);
  double mean = std::accumulate(seq.out_degree.begin(), seq.out_degree.end(), 0.0) / n;
  EXPECT_NEAR(mean, m1, 3 * std::sqrt((m2 - m1 * m1) / n));
  EXPECT_NEAR(powerlaw_mean({3.0, 100, {}, {}}), m1, 1e-12);
  auto in = seq.in_degree, out = seq.out_degree;
  std::sort(in.begin(), in.end());
  std::sort(out.begin(), out.end());
  EXPECT_EQ(in, out);
  auto g = graph_from_sequence(seq, 3);
  for (NodeId v = 0; v < g.n(); ++v) ASSERT_EQ(g.out_total(v), seq.out_degree[static_cast<std::size_t>(v)]);
}

TEST(EdgeList, TwoCycle) {
  std::istringstream in("0 1\n1 0\n");
  auto g = load_edge_list(in).graph;
  EXPECT_EQ(g.n(), 2);
  EXPECT_EQ(g.edge_count(), 2);
  EXPECT_EQ(g.in_total(0), 1);
  EXPECT_EQ(g.out_total(1), 1);
}

TEST(EdgeList, CommentsOnlyGivesEmptyGraph) {
  std::istringstream in("# Directed graph\n# Nodes: 0 Edges: 0\n");
  auto g = load_edge_list(in).graph;
  EXPECT_EQ(g.n(), 0);
  EXPECT_EQ(g.edge_count(), 0);
}

TEST(EdgeList, ParallelEdgesKept) {
  std::istringstream in("0 1\n0 1\n1 2\n");
  auto g = load_edge_list(in).graph;
  auto e = g.out_edges(0);
  EXPECT_EQ(std::count(e.begin(), e.end(), NodeId{1}), 2);
  EXPECT_EQ(g.edge_count(), 3);
}

TEST(EdgeList, SparseIdsAreRemappedAndWrittenBack) {
  std::istringstream in("# c\n100 7\n7 100\n7 55\n");
  auto lg = load_edge_list(in);
  EXPECT_EQ(lg.graph.n(), 3);
  std::ostringstream out, ids;
  write_edge_list(lg.graph, out);
  write_id_mapping(lg, ids);
  std::istringstream again(out.str());
  auto g2 = load_edge_list(again).graph;
  EXPECT_EQ(g2.edge_count(), 3);
  EXPECT_NE(ids.str().find("100"), std::string::npos);
}

TEST(EdgeList, ParseErrorCarriesLine) {
  std::istringstream in("0 1\n# ok\n2 x\n");
  try {
    load_edge_list(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3u);
  }
}

TEST(EdgeList, LabelMap) {
  std::istringstream map_text("0 red\n1 blue\n2 red\n");
  auto map = load_label_map(map_text);
  std::istringstream in("0 1\n1 2\n");
  auto g = load_edge_list(in, &map).graph;
  EXPECT_EQ(g.num_labels(), 2u);
  EXPECT_EQ(g.label_of(0), g.label_of(2));
  EXPECT_NE(g.label_of(0), g.label_of(1));
  std::istringstream missing("0 1\n5 1\n");
  EXPECT_THROW(load_edge_list(missing, &map), ParseError);
}

TEST(InitialStates, ExactPlacementCounts) {
  auto g = sample_cbm({50, 50}, {{2, 1}, {1, 2}}, 100, 3);
  Rng rng(4);
  auto z = place_initial_states(g, {{10, 0}, {0, 5}}, 2, rng);
  int c0 = 0, c1 = 0, c2 = 0;
  for (NodeId v = 0; v < g.n(); ++v) {
    auto s = z[static_cast<std::size_t>(v)];
    if (s == 0) {
      EXPECT_EQ(g.label_of(v), 0u);
      ++c0;
    }
    if (s == 1) {
      EXPECT_EQ(g.label_of(v), 1u);
      ++c1;
    }
    if (s == 2) ++c2;
  }
  EXPECT_EQ(c0, 10);
  EXPECT_EQ(c1, 5);
  EXPECT_EQ(c2, 85);
}

TEST(Rng, SplitStreamsAreReproducibleAndDistinct) {
  Rng a(42), b(42);
  EXPECT_EQ(a.split(3)(), b.split(3)());
  EXPECT_NE(a.split(3)(), a.split(4)());
  Rng c(1);
  double s = 0;
  for (int i = 0; i < 100000; ++i) s += c.uniform();
  EXPECT_NEAR(s / 100000, 0.5, 4 * std::sqrt(1.0 / 12 / 100000));
}
