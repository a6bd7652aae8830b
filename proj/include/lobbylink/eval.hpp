#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lobbylink/corpus.hpp"
#include "lobbylink/scorer.hpp"

namespace lobbylink::eval {

/// One scored pair: score (nullopt = ABSENT) and whether it is a true link.
struct Labeled {
  std::optional<double> score;
  bool positive = false;
};

struct RocPoint {
  double fpr = 0, tpr = 0;
  /// Score of the tie group crossed to reach this point; nullopt for the
  /// origin and for the ABSENT group.
  std::optional<double> threshold;
};

/// Stepwise curve from (0,0) to (1,1); one step per group of tied scores.
/// ABSENT entries form a single group ranked below every real score.
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t absent = 0;
};

using PairSet = std::set<corpus::MepLobbyPair>;

/// Throws precondition when there are no positives or no negatives.
RocCurve roc(std::vector<Labeled> items);

/// Pairs of the universe (every matrix pair when `universe` is null) labelled
/// against `truth`. Truth links outside the universe are ignored.
std::vector<Labeled> label_pairs(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth,
                                 const PairSet* universe = nullptr);

RocCurve roc(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth,
             const PairSet* universe = nullptr);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);
/// Area over fpr in [0, alpha], interpolated at alpha, without normalisation.
double pauc_area(const RocCurve& curve, double alpha);
/// pauc_area / alpha, so an ideal scorer gets 1 and a random one alpha / 2.
double pauc(const RocCurve& curve, double alpha);

/// Probability that a random positive outranks a random negative, ties
/// counted one half, ABSENT below everything. Quadratic; reference oracle.
double mann_whitney_bruteforce(const std::vector<Labeled>& items);

struct OperatingPoint {
  double threshold = 0;
  double fpr = 0, tpr = 0;
  PairSet links;  // universe pairs with score >= threshold
};

OperatingPoint operating_point(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth,
                               double threshold, const PairSet* universe = nullptr);

/// Every (MEP, lobby) pair where both sides own at least one document of the
/// given kinds.
PairSet document_universe(const corpus::Corpus& corpus, const std::set<corpus::DocKind>& mep_kinds,
                          const std::set<corpus::DocKind>& lobby_kinds);

struct EvalReport {
  std::string method;
  std::string truth_kind;
  double auc = 0;
  double pauc = 0;       // normalised by alpha
  double pauc_area = 0;  // raw area
  double alpha = 0.05;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t absent = 0;
};

EvalReport evaluate(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth, double alpha,
                    const PairSet* universe = nullptr);

/// Pretty-printed JSON object with fixed key order; records the ABSENT policy.
std::string report_json(const EvalReport& r);
EvalReport parse_report_json(const std::string& text);

/// "fpr<TAB>tpr<TAB>threshold" per point; threshold "-" at the origin and
/// "ABSENT" for the ABSENT group.
void write_curve(const std::filesystem::path& path, const RocCurve& curve);

}  // namespace lobbylink::eval
