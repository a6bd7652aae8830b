#include <algorithm>
#include <numeric>

#include "lobbylink/analyze.hpp"
#include "lobbylink/error.hpp"

namespace lobbylink::analyze {
namespace {

void normalize_rows(FocusMatrix& m) {
  m.normalized = m.raw;
  for (auto& row : m.normalized) {
    const double mx = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    if (mx > 0)
      for (double& x : row) x /= mx;
  }
}

}  // namespace

FocusMatrix focus_matrix(const std::vector<DiscoveredLink>& links, const std::vector<std::string>& lobbies,
                         const corpus::Corpus& corpus, const std::vector<corpus::PoliticalGroup>& groups,
                         FocusCounting counting) {
  FocusMatrix m;
  std::map<std::string, std::size_t> col, row;
  for (const auto& g : groups) {
    if (g.member_count <= 0)
      throw Error(ErrorKind::precondition, "group '" + g.group_id + "' has non-positive member count");
    if (!col.emplace(g.group_id, m.columns.size()).second)
      throw Error(ErrorKind::duplicate_id, "duplicate group '" + g.group_id + "'");
    m.columns.push_back(g.group_id);
  }
  for (const auto& l : lobbies) {
    if (!row.emplace(l, m.rows.size()).second) throw Error(ErrorKind::duplicate_id, "duplicate lobby '" + l + "'");
    m.rows.push_back(l);
  }
  std::vector<std::vector<double>> n(m.rows.size(), std::vector<double>(m.columns.size(), 0.0));
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& link : links) {
    auto r = row.find(link.lobby_id);
    if (r == row.end()) continue;
    const auto* mep = corpus.find_mep(link.mep_id);
    if (!mep) throw Error(ErrorKind::dangling_reference, "link names unknown MEP '" + link.mep_id + "'");
    auto c = col.find(mep->group_id);
    if (c == col.end())
      throw Error(ErrorKind::dangling_reference,
                  "MEP '" + link.mep_id + "' belongs to unknown group '" + mep->group_id + "'");
    if (counting == FocusCounting::distinct_meps && !seen.emplace(link.lobby_id, link.mep_id).second) continue;
    n[r->second][c->second] += 1.0;
  }
  m.raw = n;
  for (auto& rowv : m.raw)
    for (std::size_t j = 0; j < rowv.size(); ++j) rowv[j] /= static_cast<double>(groups[j].member_count);
  normalize_rows(m);
  return m;
}

FocusMatrix cluster_focus(const FocusMatrix& lobby_focus, const ClusterAssignment& clusters) {
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < lobby_focus.rows.size(); ++i) {
    auto it = clusters.cluster_of.find(lobby_focus.rows[i]);
    if (it != clusters.cluster_of.end()) members[it->second].push_back(i);
  }
  FocusMatrix out;
  out.columns = lobby_focus.columns;
  const std::size_t d = out.columns.size();
  for (const auto& [cluster, idx] : members) {
    out.rows.push_back(cluster);
    std::vector<double> raw(d, 0.0), norm(d, 0.0);
    for (auto i : idx)
      for (std::size_t j = 0; j < d; ++j) {
        raw[j] += lobby_focus.raw[i][j];
        norm[j] += lobby_focus.normalized[i][j];
      }
    for (std::size_t j = 0; j < d; ++j) {
      raw[j] /= static_cast<double>(idx.size());
      norm[j] /= static_cast<double>(idx.size());
    }
    out.raw.push_back(std::move(raw));
    out.normalized.push_back(std::move(norm));
  }
  return out;
}

std::vector<double> group_scores(const std::vector<std::string>& columns,
                                 const std::vector<corpus::PoliticalGroup>& groups, corpus::IdeologyDimension dim) {
  std::vector<double> out;
  for (const auto& c : columns) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.group_id == c; });
    if (it == groups.end()) throw Error(ErrorKind::dangling_reference, "unknown group '" + c + "'");
    out.push_back(corpus::component(it->ideology, dim));
  }
  return out;
}

FocusMatrix order_columns_by_ideology(const FocusMatrix& m, const std::vector<corpus::PoliticalGroup>& groups,
                                      corpus::IdeologyDimension dim) {
  const auto scores = group_scores(m.columns, groups, dim);
  std::vector<std::size_t> order(m.columns.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return scores[a] != scores[b] ? scores[a] < scores[b] : m.columns[a] < m.columns[b];
  });
  FocusMatrix out;
  out.rows = m.rows;
  for (auto j : order) out.columns.push_back(m.columns[j]);
  auto permute = [&](const std::vector<std::vector<double>>& src) {
    std::vector<std::vector<double>> dst;
    for (const auto& r : src) {
      std::vector<double> v;
      for (auto j : order) v.push_back(r[j]);
      dst.push_back(std::move(v));
    }
    return dst;
  };
  out.raw = permute(m.raw);
  out.normalized = permute(m.normalized);
  return out;
}

double weighted_ideology(const std::vector<double>& focus_row, const std::vector<double>& group_scores) {
  if (focus_row.size() != group_scores.size())
    throw Error(ErrorKind::invalid_argument, "focus row and group scores differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < focus_row.size(); ++j) {
    num += focus_row[j] * group_scores[j];
    den += focus_row[j];
  }
  if (!(den > 0)) throw Error(ErrorKind::degenerate, "weighted ideology of an all-zero focus row");
  return num / den;
}

}  // namespace lobbylink::analyze
