#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "lobbylink/error.hpp"
#include "lobbylink/eval.hpp"

namespace lobbylink::eval {

RocCurve roc(std::vector<Labeled> items) {
  RocCurve c;
  for (const auto& it : items) {
    (it.positive ? c.positives : c.negatives) += 1;
    c.absent += !it.score.has_value();
  }
  if (c.positives == 0 || c.negatives == 0)
    throw Error(ErrorKind::precondition, "ROC needs at least one positive and one negative pair (got " +
                                             std::to_string(c.positives) + " positive, " +
                                             std::to_string(c.negatives) + " negative)");
  std::sort(items.begin(), items.end(), [](const Labeled& a, const Labeled& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    return a.score && *a.score > *b.score;
  });
  const double P = static_cast<double>(c.positives), N = static_cast<double>(c.negatives);
  c.points.push_back({0.0, 0.0, std::nullopt});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t k = i;
    while (k < items.size() && items[k].score == items[i].score) {
      (items[k].positive ? tp : fp) += 1;
      ++k;
    }
    c.points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P, items[i].score});
    i = k;
  }
  return c;
}

std::vector<Labeled> label_pairs(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth,
                                 const PairSet* universe) {
  std::vector<Labeled> out;
  auto add = [&](std::size_t i, std::size_t j) {
    out.push_back({scores.at(i, j).score, truth.contains(scores.meps()[i], scores.lobbies()[j])});
  };
  if (!universe) {
    for (std::size_t i = 0; i < scores.rows(); ++i)
      for (std::size_t j = 0; j < scores.cols(); ++j) add(i, j);
    return out;
  }
  for (const auto& [mep, lobby] : *universe) {
    auto i = scores.mep_index(mep);
    auto j = scores.lobby_index(lobby);
    if (!i || !j)
      throw Error(ErrorKind::dangling_reference,
                  "universe pair (" + mep + ", " + lobby + ") has no entry in the score matrix");
    add(*i, *j);
  }
  return out;
}

RocCurve roc(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth, const PairSet* universe) {
  return roc(label_pairs(scores, truth, universe));
}

double auc(const RocCurve& curve) {
  double a = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i - 1];
    const auto& q = curve.points[i];
    a += (q.fpr - p.fpr) * (p.tpr + q.tpr) / 2.0;
  }
  return a;
}

double pauc_area(const RocCurve& curve, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::invalid_argument, "alpha must lie in (0, 1]");
  double a = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i - 1];
    const auto& q = curve.points[i];
    if (p.fpr >= alpha) break;
    if (q.fpr <= alpha) {
      a += (q.fpr - p.fpr) * (p.tpr + q.tpr) / 2.0;
    } else {
      const double t = (alpha - p.fpr) / (q.fpr - p.fpr);
      const double y = p.tpr + t * (q.tpr - p.tpr);
      a += (alpha - p.fpr) * (p.tpr + y) / 2.0;
      break;
    }
  }
  return a;
}

double pauc(const RocCurve& curve, double alpha) { return pauc_area(curve, alpha) / alpha; }

double mann_whitney_bruteforce(const std::vector<Labeled>& items) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (const auto& p : items) {
    if (!p.positive) continue;
    for (const auto& n : items) {
      if (n.positive) continue;
      ++pairs;
      if (p.score && n.score) {
        wins += *p.score > *n.score ? 1.0 : *p.score == *n.score ? 0.5 : 0.0;
      } else if (p.score) {
        wins += 1.0;
      } else if (!n.score) {
        wins += 0.5;
      }
    }
  }
  if (pairs == 0) throw Error(ErrorKind::precondition, "Mann-Whitney needs positives and negatives");
  return wins / static_cast<double>(pairs);
}

OperatingPoint operating_point(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth,
                               double threshold, const PairSet* universe) {
  OperatingPoint op;
  op.threshold = threshold;
  std::size_t pos = 0, neg = 0, tp = 0, fp = 0;
  auto visit = [&](std::size_t i, std::size_t j) {
    const bool positive = truth.contains(scores.meps()[i], scores.lobbies()[j]);
    (positive ? pos : neg) += 1;
    const auto& s = scores.at(i, j).score;
    if (s && *s >= threshold) {
      (positive ? tp : fp) += 1;
      op.links.emplace(scores.meps()[i], scores.lobbies()[j]);
    }
  };
  if (universe) {
    for (const auto& [mep, lobby] : *universe) {
      auto i = scores.mep_index(mep);
      auto j = scores.lobby_index(lobby);
      if (!i || !j) throw Error(ErrorKind::dangling_reference, "universe pair has no score matrix entry");
      visit(*i, *j);
    }
  } else {
    for (std::size_t i = 0; i < scores.rows(); ++i)
      for (std::size_t j = 0; j < scores.cols(); ++j) visit(i, j);
  }
  if (pos == 0 || neg == 0)
    throw Error(ErrorKind::precondition, "operating point needs at least one positive and one negative pair");
  op.fpr = static_cast<double>(fp) / static_cast<double>(neg);
  op.tpr = static_cast<double>(tp) / static_cast<double>(pos);
  return op;
}

PairSet document_universe(const corpus::Corpus& corpus, const std::set<corpus::DocKind>& mep_kinds,
                          const std::set<corpus::DocKind>& lobby_kinds) {
  std::vector<std::string> meps, lobbies;
  for (const auto& m : corpus.meps())
    if (!corpus.documents_of(m.mep_id, mep_kinds).empty()) meps.push_back(m.mep_id);
  for (const auto& l : corpus.lobbies())
    if (!corpus.documents_of(l.lobby_id, lobby_kinds).empty()) lobbies.push_back(l.lobby_id);
  PairSet out;
  for (const auto& m : meps)
    for (const auto& l : lobbies) out.emplace(m, l);
  return out;
}

EvalReport evaluate(const scorer::ScoreMatrix& scores, const corpus::ValidationLinkSet& truth, double alpha,
                    const PairSet* universe) {
  const auto curve = roc(scores, truth, universe);
  EvalReport r;
  r.method = scorer::to_string(scores.method());
  r.truth_kind = corpus::to_string(truth.kind);
  r.auc = auc(curve);
  r.alpha = alpha;
  r.pauc_area = pauc_area(curve, alpha);
  r.pauc = r.pauc_area / alpha;
  r.positives = curve.positives;
  r.negatives = curve.negatives;
  r.absent = curve.absent;
  return r;
}

std::string report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["truth"] = r.truth_kind;
  j["auc"] = r.auc;
  j["pauc"] = r.pauc;
  j["pauc_area"] = r.pauc_area;
  j["alpha"] = r.alpha;
  j["positives"] = r.positives;
  j["negatives"] = r.negatives;
  j["absent"] = r.absent;
  j["absent_policy"] = "ranked-below-all-scores";
  j["tie_policy"] = "grouped-steps";
  return j.dump(2) + "\n";
}

EvalReport parse_report_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.method = j.at("method").get<std::string>();
    r.truth_kind = j.at("truth").get<std::string>();
    r.auc = j.at("auc").get<double>();
    r.pauc = j.at("pauc").get<double>();
    r.pauc_area = j.at("pauc_area").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.positives = j.at("positives").get<std::size_t>();
    r.negatives = j.at("negatives").get<std::size_t>();
    r.absent = j.at("absent").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed eval report: ") + e.what());
  }
}

void write_curve(const std::filesystem::path& path, const RocCurve& curve) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write curve file " + path.string());
  char buf[96];
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t", p.fpr, p.tpr);
    out << buf;
    if (p.threshold) {
      std::snprintf(buf, sizeof buf, "%.17g", *p.threshold);
      out << buf << '\n';
    } else {
      out << (i == 0 ? "-" : "ABSENT") << '\n';
    }
  }
}

}  // namespace lobbylink::eval
