#include <gtest/gtest.h>

#include <random>

#include "lobbylink/error.hpp"
#include "lobbylink/eval.hpp"
#include "test_util.hpp"

using namespace lobbylink;
using namespace lobbylink::eval;

namespace {

std::vector<Labeled> hand_example() {
  return {{0.9, true}, {0.5, true}, {0.7, false}, {0.5, false}, {0.1, false}};
}

// Scores on a coarse grid so ties are common; roughly 10% ABSENT.
std::vector<Labeled> random_items(std::mt19937_64& rng, std::size_t n) {
  std::vector<Labeled> out;
  std::uniform_int_distribution<int> grid(0, 9);
  for (std::size_t i = 0; i < n; ++i) {
    Labeled l;
    l.positive = rng() % 3 == 0;
    if (rng() % 10) l.score = grid(rng) / 10.0 + (l.positive ? 0.05 * (rng() % 4) : 0.0);
    out.push_back(l);
  }
  out.push_back({0.3, true});
  out.push_back({0.3, false});
  return out;
}

}  // namespace

TEST(Roc, HandExampleWithTies) {
  const auto c = roc(hand_example());
  ASSERT_EQ(c.points.size(), 5u);
  EXPECT_EQ(c.points[1].tpr, 0.5);
  EXPECT_EQ(c.points[1].fpr, 0.0);
  EXPECT_EQ(c.points[3].threshold, 0.5);
  EXPECT_DOUBLE_EQ(c.points[3].fpr, 2.0 / 3);
  EXPECT_EQ(c.points[3].tpr, 1.0);
  EXPECT_DOUBLE_EQ(auc(c), 0.75);
  EXPECT_DOUBLE_EQ(mann_whitney_bruteforce(hand_example()), 0.75);
  // [0, 1/3] at tpr 0.5, then [1/3, 1/2] rising from 0.5 to 0.75.
  EXPECT_NEAR(pauc_area(c, 0.5), 1.0 / 6 + (1.0 / 6) * 1.25 / 2, 1e-15);
  EXPECT_NEAR(pauc(c, 0.5), 2 * (1.0 / 6 + (1.0 / 6) * 1.25 / 2), 1e-15);
  EXPECT_THROW(pauc(c, 0.0), Error);
}

TEST(Roc, AbsentRanksBelowEveryScore) {
  std::vector<Labeled> items = {{std::nullopt, true}, {0.0, false}, {std::nullopt, false}, {-5.0, true}};
  const auto c = roc(items);
  EXPECT_EQ(c.absent, 2u);
  EXPECT_FALSE(c.points.back().threshold.has_value());
  // The -5 positive beats no scored negative; both ABSENT tie each other.
  EXPECT_DOUBLE_EQ(auc(c), (0.0 + 1.0 + 0.0 + 0.5) / 4);
  EXPECT_DOUBLE_EQ(mann_whitney_bruteforce(items), auc(c));
}

TEST(Roc, SingleClassIsAPrecondition) {
  try {
    roc({{0.1, true}, {0.2, true}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Roc, AucEqualsMannWhitneyOnRandomInstances) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    auto items = random_items(rng, 20 + rng() % 300);
    const double a = auc(roc(items));
    EXPECT_NEAR(a, mann_whitney_bruteforce(items), 1e-12);
    std::shuffle(items.begin(), items.end(), rng);
    EXPECT_NEAR(auc(roc(items)), a, 1e-12);
  }
}

TEST(Roc, CurveIsMonotoneFromOriginToCorner) {
  std::mt19937_64 rng(23);
  const auto c = roc(random_items(rng, 500));
  EXPECT_EQ(c.points.front().fpr, 0.0);
  EXPECT_EQ(c.points.front().tpr, 0.0);
  EXPECT_DOUBLE_EQ(c.points.back().fpr, 1.0);
  EXPECT_DOUBLE_EQ(c.points.back().tpr, 1.0);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    EXPECT_GE(c.points[i].fpr, c.points[i - 1].fpr);
    EXPECT_GE(c.points[i].tpr, c.points[i - 1].tpr);
  }
}

TEST(Roc, PerfectAndRandomScorers) {
  std::vector<Labeled> perfect;
  for (int i = 0; i < 100; ++i) perfect.push_back({double(i), i >= 90});
  EXPECT_DOUBLE_EQ(auc(roc(perfect)), 1.0);
  EXPECT_DOUBLE_EQ(pauc(roc(perfect), 0.05), 1.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<Labeled> random;
  for (int i = 0; i < 200000; ++i) random.push_back({u(rng), rng() % 10 == 0});
  const auto c = roc(random);
  EXPECT_NEAR(auc(c), 0.5, 0.01);
  EXPECT_NEAR(pauc(c, 0.05), 0.025, 0.003);
}

TEST(Eval, UniverseAndOperatingPoint) {
  scorer::ScoreMatrix m(scorer::Method::ss, {"m1", "m2"}, {"l1", "l2"});
  m.at(0, 0).score = 0.9;
  m.at(0, 1).score = 0.2;
  m.at(1, 0).score = 0.4;
  corpus::ValidationLinkSet truth{corpus::LinkKind::meeting, {{"m1", "l1"}, {"m9", "l9"}}};
  PairSet universe = {{"m1", "l1"}, {"m1", "l2"}, {"m2", "l1"}};
  const auto labelled = label_pairs(m, truth, &universe);
  EXPECT_EQ(labelled.size(), 3u);
  EXPECT_EQ(label_pairs(m, truth).size(), 4u);
  const auto r = evaluate(m, truth, 0.05, &universe);
  EXPECT_EQ(r.positives, 1u);
  EXPECT_EQ(r.negatives, 2u);
  EXPECT_EQ(r.absent, 0u);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_EQ(r.truth_kind, "meeting");
  const auto op = operating_point(m, truth, 0.3, &universe);
  EXPECT_EQ(op.links, (PairSet{{"m1", "l1"}, {"m2", "l1"}}));
  EXPECT_DOUBLE_EQ(op.tpr, 1.0);
  EXPECT_DOUBLE_EQ(op.fpr, 0.5);
}

TEST(Eval, ReportJsonRoundTripAndCurveFile) {
  EvalReport r{"ss", "retweet", 0.8, 0.4, 0.02, 0.05, 10, 90, 3};
  const auto text = report_json(r);
  EXPECT_NE(text.find("\"absent_policy\""), std::string::npos);
  const auto back = parse_report_json(text);
  EXPECT_EQ(back.method, "ss");
  EXPECT_EQ(back.auc, 0.8);
  EXPECT_EQ(back.absent, 3u);
  EXPECT_THROW(parse_report_json("{}"), Error);

  testutil::TempDir d("curve");
  write_curve(d / "c.tsv", roc({{0.9, true}, {std::nullopt, false}}));
  EXPECT_EQ(testutil::read_file(d / "c.tsv"), "0\t0\t-\n0\t1\t0.90000000000000002\n1\t1\tABSENT\n");
}
