#include <gtest/gtest.h>

#include <random>

#include "lobbylink/error.hpp"
#include "lobbylink/scorer.hpp"
#include "test_util.hpp"

using namespace lobbylink;
using namespace lobbylink::scorer;
using corpus::DocKind;
using testutil::TempDir;

namespace {

// MEP m<i> owns i+1 speeches, lobby l<j> owns j papers. Countries cycle
// through {AT, BE, CY}; m4 and l3 have no country.
corpus::Corpus five_by_five() {
  const char* countries[] = {"AT", "BE", "CY"};
  corpus::EntitySet e;
  std::vector<corpus::Document> docs;
  for (int i = 0; i < 5; ++i) {
    e.meps.push_back({"m" + std::to_string(i), "M" + std::to_string(i), i == 4 ? "" : countries[i % 3], "G"});
    e.lobbies.push_back({"l" + std::to_string(i), "L" + std::to_string(i), i == 3 ? "" : countries[i % 3],
                         corpus::LobbyCategory::ngo, std::nullopt, std::nullopt, std::nullopt});
    for (int k = 0; k <= i; ++k)
      docs.push_back({"s" + std::to_string(i) + "_" + std::to_string(k), "m" + std::to_string(i), DocKind::speech,
                      "speech " + std::to_string(k)});
    for (int k = 0; k < i; ++k)
      docs.push_back({"p" + std::to_string(i) + "_" + std::to_string(k), "l" + std::to_string(i),
                      DocKind::position_paper, "paper " + std::to_string(k)});
  }
  corpus::GroupTable g;
  g.groups.push_back({"G", "Group", {}, 5});
  return corpus::Corpus(std::move(docs), std::move(e), std::move(g));
}

OwnerVectors random_owners(std::mt19937_64& rng, const std::string& prefix, std::size_t owners, std::size_t max_docs,
                           std::size_t d) {
  OwnerVectors out;
  std::normal_distribution<double> g;
  for (std::size_t o = 0; o < owners; ++o) {
    const std::size_t n = rng() % (max_docs + 1);
    if (n == 0) continue;
    vectors::VectorIndex idx(d);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> v(d);
      for (auto& x : v) x = g(rng);
      idx.add(prefix + std::to_string(o) + "_" + std::to_string(k), vectors::Embedding::normalize(v));
    }
    out.emplace(prefix + std::to_string(o), std::move(idx));
  }
  return out;
}

std::vector<std::string> ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

double brute_max(const vectors::VectorIndex& a, const vectors::VectorIndex& b) {
  double best = -2;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < a.dim(); ++k) s += a.row(i)[k] * b.row(j)[k];
      best = std::max(best, s);
    }
  return best;
}

}  // namespace

TEST(Baselines, ProlificacyIsTheProductOfDocumentCounts) {
  const auto c = five_by_five();
  const auto m = score_prolificacy(c, {DocKind::speech}, {DocKind::position_paper});
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      EXPECT_EQ(m.at("m" + std::to_string(i), "l" + std::to_string(j)).score, double((i + 1) * j));
}

TEST(Baselines, NationalityMatchesCountryCodes) {
  const auto c = five_by_five();
  const auto m = score_nationality(c);
  const char* cc[] = {"AT", "BE", "CY", "AT", ""};
  const char* lc[] = {"AT", "BE", "CY", "", "BE"};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const auto& e = m.at("m" + std::to_string(i), "l" + std::to_string(j));
      if (!*cc[i] || !*lc[j])
        EXPECT_TRUE(e.absent()) << i << "," << j;
      else
        EXPECT_EQ(e.score, std::string(cc[i]) == lc[j] ? 1.0 : 0.0) << i << "," << j;
    }
}

TEST(Baselines, RandomIsSeededAndUnitInterval) {
  const auto a = score_random(ids("m", 30), ids("l", 30), 1);
  EXPECT_EQ(a, score_random(ids("m", 30), ids("l", 30), 1));
  EXPECT_NE(a, score_random(ids("m", 30), ids("l", 30), 2));
  double sum = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = *a.at(i, j).score;
      EXPECT_GE(s, 0.0);
      EXPECT_LT(s, 1.0);
      sum += s;
    }
  EXPECT_NEAR(sum / 900, 0.5, 0.05);
}

TEST(ScoreMatrix, SortedIdsAndUnknownPairs) {
  ScoreMatrix m(Method::ss, {"b", "a"}, {"y", "x"});
  EXPECT_EQ(m.meps(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(*m.lobby_index("y"), 1u);
  EXPECT_THROW(m.at("a", "z"), Error);
  EXPECT_THROW(ScoreMatrix(Method::ss, {"a", "a"}, {"x"}), Error);
  EXPECT_EQ(parse_method("class"), Method::class_);
  EXPECT_THROW(parse_method("nope"), Error);
}

TEST(Ss, MatchesBruteForceAndMarksMissingOwners) {
  std::mt19937_64 rng(3);
  const auto mv = random_owners(rng, "m", 12, 5, 16);
  const auto lv = random_owners(rng, "l", 9, 4, 16);
  PairScoringOptions opt;
  opt.search.block = 3;
  opt.workers = 3;
  const auto m = score_ss(ids("m", 12), ids("l", 9), mv, lv, opt);
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      const auto& e = m.at("m" + std::to_string(i), "l" + std::to_string(j));
      auto a = mv.find("m" + std::to_string(i));
      auto b = lv.find("l" + std::to_string(j));
      if (a == mv.end() || b == lv.end()) {
        EXPECT_TRUE(e.absent());
        EXPECT_EQ(e.note, a == mv.end() ? "no-mep-documents" : "no-lobby-documents");
        continue;
      }
      EXPECT_NEAR(*e.score, brute_max(a->second, b->second), 1e-12);
      EXPECT_EQ(e.provenance->score, *e.score);
    }
  EXPECT_EQ(m, score_ss(ids("m", 12), ids("l", 9), mv, lv, {}));
}

TEST(Ent, NeverExceedsSsAndMatchesFilteredMaxWhenExact) {
  std::mt19937_64 rng(5);
  const auto mv = random_owners(rng, "m", 10, 4, 8);
  const auto lv = random_owners(rng, "l", 10, 4, 8);
  // Admissible iff the two doc ids share their trailing digit parity.
  auto ok = [](const std::string& a, const std::string& b) { return (a.back() - b.back()) % 2 == 0; };
  NliJudge judge = [&](const std::string& lobby_doc, const std::string& mep_doc) {
    return ok(lobby_doc, mep_doc) ? providers::NliTriple{0.8, 0.1, 0.1} : providers::NliTriple{0.1, 0.1, 0.8};
  };
  EntOptions opt;
  opt.k = 8;  // 2k covers every pair of up to 4 x 4 documents
  EntStats stats;
  const auto ent = score_ent(ids("m", 10), ids("l", 10), mv, lv, judge, opt, &stats);
  const auto ss = score_ss(ids("m", 10), ids("l", 10), mv, lv);
  EXPECT_GT(stats.judged, 0u);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      const auto& e = ent.at(i, j);
      const auto& s = ss.at(i, j);
      if (s.absent()) {
        EXPECT_TRUE(e.absent());
        continue;
      }
      const auto filtered = vectors::max_inner_product_filtered(
          mv.at(ent.meps()[i]), lv.at(ent.lobbies()[j]),
          [&](const std::string& l, const std::string& r) { return ok(r, l); });
      if (!filtered) {
        EXPECT_TRUE(e.absent());
        EXPECT_EQ(e.note, "no-admissible-pair");
        continue;
      }
      ASSERT_FALSE(e.absent());
      EXPECT_LE(*e.score, *s.score);
      EXPECT_EQ(*e.score, filtered->score);
      EXPECT_EQ(e.provenance->left_doc, filtered->left_doc);
    }
}

TEST(Ent, PremiseIsTheLobbyDocument) {
  OwnerVectors mv, lv;
  mv.emplace("m", vectors::VectorIndex(2));
  lv.emplace("l", vectors::VectorIndex(2));
  mv.at("m").add("speech", vectors::Embedding::from_unit({1, 0}));
  lv.at("l").add("paper", vectors::Embedding::from_unit({1, 0}));
  std::string premise, hypothesis;
  NliJudge judge = [&](const std::string& p, const std::string& h) {
    premise = p, hypothesis = h;
    return providers::NliTriple{0.9, 0.05, 0.05};
  };
  score_ent({"m"}, {"l"}, mv, lv, judge);
  EXPECT_EQ(premise, "paper");
  EXPECT_EQ(hypothesis, "speech");
}

TEST(Ent, ExtensionAndInexactAbsentNotes) {
  // One MEP document against 5 lobby documents with distinct cosines.
  OwnerVectors mv, lv;
  mv.emplace("m", vectors::VectorIndex(2));
  lv.emplace("l", vectors::VectorIndex(2));
  mv.at("m").add("s", vectors::Embedding::from_unit({1, 0}));
  for (int k = 0; k < 5; ++k) {
    const double a = 0.1 * k;
    lv.at("l").add("p" + std::to_string(k), vectors::Embedding::from_unit({std::cos(a), std::sin(a)}));
  }
  auto only = [](const std::string& doc) {
    return NliJudge([doc](const std::string& p, const std::string&) {
      return p == doc ? providers::NliTriple{0.9, 0.05, 0.05} : providers::NliTriple{0.05, 0.05, 0.9};
    });
  };
  EntOptions opt;
  opt.k = 1;
  auto m = score_ent({"m"}, {"l"}, mv, lv, only("p1"), opt);
  EXPECT_EQ(m.at(0, 0).note, "rejected-1;found-in-extension");
  EXPECT_NEAR(*m.at(0, 0).score, std::cos(0.1), 1e-12);
  m = score_ent({"m"}, {"l"}, mv, lv, only("p4"), opt);
  EXPECT_TRUE(m.at(0, 0).absent());
  EXPECT_EQ(m.at(0, 0).note, "no-admissible-pair-in-top-2-of-5;constrained-max-not-exact");
  opt.k = 0;
  EXPECT_THROW(score_ent({"m"}, {"l"}, mv, lv, only("p0"), opt), Error);
}

TEST(ScoreFile, RoundTripKeepsScoresNotesAndProvenance) {
  std::mt19937_64 rng(9);
  const auto mv = random_owners(rng, "m", 4, 3, 8);
  const auto lv = random_owners(rng, "l", 4, 3, 8);
  const auto m = score_ss(ids("m", 4), ids("l", 4), mv, lv);
  TempDir d("scores");
  save_scores(d / "s.tsv", m, "s.tsv.manifest.json");
  const auto text = testutil::read_file(d / "s.tsv");
  EXPECT_EQ(text.rfind("#lobbylink-scores v1 method=ss manifest=s.tsv.manifest.json\n", 0), 0u);
  const auto back = load_scores(d / "s.tsv");
  ASSERT_EQ(back.meps(), m.meps());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      EXPECT_EQ(back.at(i, j).score, m.at(i, j).score);
      EXPECT_EQ(back.at(i, j).note, m.at(i, j).note);
      EXPECT_EQ(back.at(i, j).provenance.has_value(), m.at(i, j).provenance.has_value());
      if (m.at(i, j).provenance) EXPECT_EQ(back.at(i, j).provenance->right_doc, m.at(i, j).provenance->right_doc);
    }
  testutil::write_file(d / "bad.tsv", "#lobbylink-scores v1 method=ss manifest=x\nm0\tl0\tss\t0.5\n");
  try {
    load_scores(d / "bad.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
