#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lobbylink/analyze.hpp"
#include "lobbylink/error.hpp"

using namespace lobbylink;
using namespace lobbylink::analyze;

namespace {

// Groups A (2 members, ideo 1), B (4, ideo 5), C (8, ideo 9).
// Lobby x links one A, two B and two C members; y links four C members; z
// has no links.
struct FocusCase {
  corpus::Corpus corpus;
  std::vector<DiscoveredLink> links;
};

FocusCase focus_case() {
  corpus::EntitySet e;
  corpus::GroupTable g;
  const std::pair<const char*, int> sizes[] = {{"A", 2}, {"B", 4}, {"C", 8}};
  double ideo = 1;
  for (auto [id, n] : sizes) {
    g.groups.push_back({id, id, {ideo, 0, 0, 0}, n});
    ideo += 4;
    for (int k = 0; k < n; ++k) e.meps.push_back({std::string(id) + std::to_string(k), "", "", id});
  }
  for (const char* l : {"x", "y", "z"}) e.lobbies.push_back({l, l, "", corpus::LobbyCategory::ngo, {}, {}, {}});
  e.debates.push_back({"d1", "Energy", 0});
  e.debates.push_back({"d2", "Farming", 0});
  std::vector<corpus::Document> docs;
  for (const auto& m : e.meps)
    docs.push_back({"s-" + m.mep_id, m.mep_id, corpus::DocKind::speech, "text",
                    m.group_id == "C" ? std::optional<std::string>("d2") : std::optional<std::string>("d1")});
  docs.push_back({"s-extra", "A0", corpus::DocKind::speech, "text", std::nullopt});
  FocusCase fc{corpus::Corpus(std::move(docs), std::move(e), std::move(g)), {}};
  auto link = [&](const std::string& mep, const std::string& lobby) {
    fc.links.push_back({mep, lobby, 0.9, vectors::MaxMatch{0.9, "s-" + mep, "p-" + lobby, false}});
  };
  for (const char* m : {"A0", "B0", "B1", "C0", "C1"}) link(m, "x");
  for (const char* m : {"C2", "C3", "C4", "C5"}) link(m, "y");
  return fc;
}

}  // namespace

TEST(Links, ExtractOrdersAndFilters) {
  scorer::ScoreMatrix m(scorer::Method::ss, {"a", "b"}, {"x"});
  m.at(0, 0).score = 0.8;
  m.at(1, 0).score = 0.9;
  const auto links = extract_links(m, 0.8);
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0].mep_id, "b");
  EXPECT_EQ(extract_links(m, 0.85).size(), 1u);
  EXPECT_THROW(extract_links(scorer::ScoreMatrix(scorer::Method::random, {"a"}, {"x"}), 0.5), Error);
}

TEST(Focus, HandExample) {
  const auto fc = focus_case();
  const auto f = focus_matrix(fc.links, {"x", "y", "z"}, fc.corpus, fc.corpus.groups());
  EXPECT_EQ(f.columns, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(f.raw[0], (std::vector<double>{0.5, 0.5, 0.25}));
  EXPECT_EQ(f.normalized[0], (std::vector<double>{1.0, 1.0, 0.5}));
  EXPECT_EQ(f.normalized[1], (std::vector<double>{0.0, 0.0, 1.0}));
  EXPECT_EQ(f.normalized[2], (std::vector<double>{0.0, 0.0, 0.0}));
  for (std::size_t r = 0; r < 2; ++r)
    EXPECT_EQ(*std::max_element(f.normalized[r].begin(), f.normalized[r].end()), 1.0);

  const auto scores = group_scores(f.columns, fc.corpus.groups(), corpus::IdeologyDimension::ideo);
  EXPECT_DOUBLE_EQ(weighted_ideology(f.normalized[0], scores), (1 + 5 + 0.5 * 9) / 2.5);
  EXPECT_DOUBLE_EQ(weighted_ideology(f.normalized[1], scores), 9.0);
  try {
    weighted_ideology(f.normalized[2], scores);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate);
  }
}

TEST(Focus, DistinctMepsVersusLinkRecords) {
  auto fc = focus_case();
  fc.links.push_back(fc.links.front());  // A0 -> x twice
  const auto distinct = focus_matrix(fc.links, {"x"}, fc.corpus, fc.corpus.groups());
  const auto records = focus_matrix(fc.links, {"x"}, fc.corpus, fc.corpus.groups(), FocusCounting::link_records);
  EXPECT_EQ(distinct.raw[0][0], 0.5);
  EXPECT_EQ(records.raw[0][0], 1.0);
}

TEST(Focus, ClustersAverageAndColumnsFollowIdeology) {
  const auto fc = focus_case();
  const auto f = focus_matrix(fc.links, {"x", "y", "z"}, fc.corpus, fc.corpus.groups());
  ClusterAssignment ca{{{"x", "k1"}, {"y", "k1"}, {"z", "k2"}}, {{"k1", "one"}, {"k2", "two"}}};
  const auto c = cluster_focus(f, ca);
  EXPECT_EQ(c.rows, (std::vector<std::string>{"k1", "k2"}));
  EXPECT_EQ(c.normalized[0], (std::vector<double>{0.5, 0.5, 0.75}));

  auto groups = fc.corpus.groups();
  groups[0].ideology.ideo = 10;  // A now sits right of C
  const auto o = order_columns_by_ideology(f, groups);
  EXPECT_EQ(o.columns, (std::vector<std::string>{"B", "C", "A"}));
  EXPECT_EQ(o.normalized[0], (std::vector<double>{1.0, 0.5, 1.0}));
}

TEST(Debates, RatePerSpeechAndWarnings) {
  auto fc = focus_case();
  fc.links.push_back({"A0", "z", 0.9, vectors::MaxMatch{0.9, "s-extra", "p", false}});
  std::vector<std::string> warnings;
  const auto r = debate_rank(fc.links, fc.corpus, nullptr, &warnings);
  ASSERT_EQ(r.size(), 2u);
  // d1 has 6 speeches and 3 links; d2 has 8 speeches and 6 links.
  EXPECT_EQ(r[0].debate_id, "d2");
  EXPECT_EQ(r[0].speech_count, 8);
  EXPECT_DOUBLE_EQ(r[0].rate, 6.0 / 8);
  EXPECT_DOUBLE_EQ(r[1].rate, 3.0 / 6);
  EXPECT_EQ(warnings.size(), 1u);
  const std::set<std::string> only_y = {"y"};
  const auto ry = debate_rank(fc.links, fc.corpus, &only_y);
  EXPECT_EQ(ry[0].links, 4u);
  EXPECT_EQ(ry[1].links, 0u);
}

TEST(KMeans, SeparatesBlobsAndIsSeeded) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 0.1);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({(i % 3) * 10.0 + g(rng), (i % 3) * -5.0 + g(rng)});
  const auto r = kmeans(pts, 3, 7);
  for (int i = 3; i < 60; ++i) EXPECT_EQ(r.assignment[i], r.assignment[i % 3]);
  EXPECT_NE(r.assignment[0], r.assignment[1]);
  EXPECT_NE(r.assignment[1], r.assignment[2]);
  EXPECT_EQ(kmeans(pts, 3, 7).assignment, r.assignment);
  EXPECT_LT(r.inertia, 60 * 0.1);
  try {
    kmeans(pts, 61, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Pca, RecoversTheDominantDirection) {
  std::vector<std::vector<double>> rows;
  for (int i = -5; i <= 5; ++i) rows.push_back({double(i), double(i) + (i % 2 ? 0.1 : -0.1), 1.0});
  const auto p = pca(rows, 2);
  ASSERT_EQ(p.components.size(), 2u);
  EXPECT_NEAR(p.components[0][0], std::sqrt(0.5), 1e-2);
  EXPECT_GT(p.components[0][1], 0);
  EXPECT_GE(p.explained_variance[0], p.explained_variance[1]);
  double dot = 0, n0 = 0;
  for (int k = 0; k < 3; ++k) dot += p.components[0][k] * p.components[1][k], n0 += p.components[0][k] * p.components[0][k];
  EXPECT_NEAR(dot, 0, 1e-12);
  EXPECT_NEAR(n0, 1, 1e-12);
  EXPECT_NEAR(p.projections[10][0], std::sqrt(50.0), 0.1);
  EXPECT_THROW(pca(rows, 4), Error);
}

TEST(Spearman, RanksAndPValueRegimes) {
  EXPECT_EQ(average_ranks({10, 20, 20, 30}), (std::vector<double>{1, 2.5, 2.5, 4}));
  const auto exact = spearman({1, 2, 3, 4, 5}, {2, 4, 6, 8, 10});
  EXPECT_DOUBLE_EQ(exact.rho, 1.0);
  EXPECT_EQ(exact.p_method, "exact-permutation");
  EXPECT_NEAR(exact.p_value, 2.0 / 120, 1e-12);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3, 4}, {4, 3, 2, 1}).rho, -1.0);

  std::vector<double> x, y;
  for (int i = 0; i < 12; ++i) x.push_back(i), y.push_back(std::pow(i - 6.0, 3));
  const auto mc = spearman(x, y, 1);
  EXPECT_DOUBLE_EQ(mc.rho, 1.0);
  EXPECT_EQ(mc.p_method, "monte-carlo-permutation");
  EXPECT_LT(mc.p_value, 1e-3);
  EXPECT_EQ(spearman(x, y, 1).p_value, mc.p_value);

  x.clear(), y.clear();
  for (int i = 0; i < 40; ++i) x.push_back(i), y.push_back(i % 2 ? i : -i);
  const auto t = spearman(x, y);
  EXPECT_EQ(t.p_method, "t-approximation");
  EXPECT_GT(t.p_value, 0);
  EXPECT_LT(t.p_value, 1);
}

TEST(Spearman, TiesMatchPearsonOnAverageRanks) {
  const std::vector<double> x = {1, 1, 2, 3, 3, 3, 4, 5, 5};
  const std::vector<double> y = {2, 1, 1, 4, 3, 5, 5, 9, 7};
  const auto rx = average_ranks(x), ry = average_ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i] / x.size(), my += ry[i] / y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  EXPECT_NEAR(spearman(x, y).rho, sxy / std::sqrt(sxx * syy), 1e-12);
}

TEST(Inspect, MarksSharedVocabulary) {
  std::vector<corpus::Document> docs = {
      {"s", "m", corpus::DocKind::speech, "Wind power is the future."},
      {"p", "l", corpus::DocKind::position_paper, "We back wind turbines."}};
  corpus::EntitySet e;
  e.meps.push_back({"m", "M", "", "G"});
  e.lobbies.push_back({"l", "L", "", corpus::LobbyCategory::ngo, {}, {}, {}});
  corpus::GroupTable g;
  g.groups.push_back({"G", "G", {}, 1});
  const corpus::Corpus c(std::move(docs), std::move(e), std::move(g));
  const auto out = inspect_match({"m", "l", 0.5, vectors::MaxMatch{0.5, "s", "p", false}}, c,
                                 providers::NliTriple{0.7, 0.2, 0.1});
  EXPECT_NE(out.find("wind"), std::string::npos);
  EXPECT_NE(out.find("0.5"), std::string::npos);
  EXPECT_NE(out.find(kLinkCaveat), std::string::npos);
  EXPECT_NE(out.find("passes entailment filter"), std::string::npos);
  const auto excluded = inspect_match({"m", "l", 0.5, vectors::MaxMatch{0.5, "s", "p", false}}, c,
                                      providers::NliTriple{0.05, 0.05, 0.9});
  EXPECT_NE(excluded.find("excluded by entailment"), std::string::npos);
}
