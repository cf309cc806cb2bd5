#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "citepred/text.hpp"

namespace oracle {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& x, std::size_t limit) {
  for (std::size_t i = 0; i < limit && i < v.size(); ++i) {
    if (v[i] == x) return true;
  }
  return false;
}

std::size_t distinct_hits(const std::vector<std::string>& pred, const std::vector<std::string>& gt,
                          std::size_t k) {
  std::size_t hits = 0;
  for (const auto& g : std::set<std::string>(gt.begin(), gt.end())) {
    if (contains(pred, g, k)) ++hits;
  }
  return hits;
}

void sort_ranked(std::vector<citepred::ScoredDoc>& docs) {
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
    if (a.score > b.score) return true;
    if (a.score < b.score) return false;
    return a.id < b.id;
  });
}

citepred::RankedList take(std::vector<citepred::ScoredDoc> docs, std::size_t k) {
  sort_ranked(docs);
  if (docs.size() > k) docs.resize(k);
  return {std::move(docs)};
}

}  // namespace

double recall(const std::vector<std::string>& pred, const std::vector<std::string>& gt,
              std::size_t k) {
  const std::set<std::string> truth(gt.begin(), gt.end());
  return static_cast<double>(distinct_hits(pred, gt, k)) / static_cast<double>(truth.size());
}

double reciprocal_rank(const std::vector<std::string>& pred, const std::vector<std::string>& gt,
                       std::size_t k) {
  for (std::size_t i = 0; i < k && i < pred.size(); ++i) {
    if (contains(gt, pred[i], gt.size())) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double ndcg(const std::vector<std::string>& pred, const std::vector<std::string>& gt,
            std::size_t k) {
  double dcg = 0.0;
  for (std::size_t i = 0; i < k && i < pred.size(); ++i) {
    const bool relevant = contains(gt, pred[i], gt.size()) && !contains(pred, pred[i], i);
    const double rel = relevant ? 1.0 : 0.0;
    dcg += (std::pow(2.0, rel) - 1.0) / (std::log(static_cast<double>(i) + 2.0) / std::log(2.0));
  }
  const std::set<std::string> truth(gt.begin(), gt.end());
  double idcg = 0.0;
  for (std::size_t i = 1; i <= std::min(k, truth.size()); ++i) {
    idcg += 1.0 / (std::log(static_cast<double>(i) + 1.0) / std::log(2.0));
  }
  return dcg / idcg;
}

double hit_count(const std::vector<std::string>& pred, const std::vector<std::string>& gt,
                 std::size_t k) {
  return static_cast<double>(distinct_hits(pred, gt, k)) / static_cast<double>(k);
}

double hit_any(const std::vector<std::string>& pred, const std::vector<std::string>& gt,
               std::size_t k) {
  return distinct_hits(pred, gt, k) > 0 ? 1.0 : 0.0;
}

double paca(const std::vector<std::vector<std::string>>& candidates,
            const std::vector<std::string>& gt, std::size_t k) {
  double total = 0.0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    for (std::size_t j = 0; j < k && j < candidates[p].size(); ++j) {
      if (candidates[p][j] == gt[p]) {
        const double rank = static_cast<double>(j + 1);
        total += 1.0 - (rank - 1.0) / static_cast<double>(k);
        break;
      }
    }
  }
  return total / static_cast<double>(gt.size());
}

double entropy(const std::vector<std::string>& labels) {
  std::map<std::string, double> counts;
  for (const auto& l : labels) counts[l] += 1.0;
  double h = 0.0;
  for (const auto& [label, n] : counts) {
    const double p = n / static_cast<double>(labels.size());
    h += p * std::log(1.0 / p);
  }
  return h / std::log(2.0);
}

citepred::RankedList sparse_full_scan(const std::vector<std::pair<std::string, std::string>>& docs,
                                      const std::string& query, citepred::SparseScorer scorer,
                                      std::size_t k, const citepred::SparseConfig& config) {
  const double n = static_cast<double>(docs.size());
  std::vector<std::map<std::string, double>> tf(docs.size());
  std::vector<double> length(docs.size(), 0.0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : citepred::tokenize(docs[d].second, config.tokenizer)) {
      tf[d][t] += 1.0;
      length[d] += 1.0;
    }
  }
  double avgdl = 0.0;
  for (double l : length) avgdl += l;
  avgdl /= n;
  auto df = [&](const std::string& term) {
    double count = 0.0;
    for (const auto& m : tf) count += m.count(term) ? 1.0 : 0.0;
    return count;
  };

  std::map<std::string, double> qtf;
  for (const auto& t : citepred::tokenize(query, config.tokenizer)) qtf[t] += 1.0;

  std::vector<citepred::ScoredDoc> scored;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    double score = 0.0;
    if (scorer == citepred::SparseScorer::bm25) {
      const double k1 = config.bm25.k1, b = config.bm25.b;
      for (const auto& [term, unused] : qtf) {
        const auto it = tf[d].find(term);
        if (it == tf[d].end()) continue;
        const double f = df(term);
        const double idf = std::log((n - f + 0.5) / (f + 0.5) + 1.0);
        score += idf * it->second * (k1 + 1.0) /
                 (it->second + k1 * (1.0 - b + b * length[d] / avgdl));
      }
    } else {
      auto weight = [&](double count, const std::string& term) {
        return std::log(1.0 + count) * std::log(n / df(term));
      };
      double dot = 0.0, qnorm = 0.0, dnorm = 0.0;
      for (const auto& [term, count] : qtf) {
        if (df(term) == 0.0) continue;
        const double wq = weight(count, term);
        qnorm += wq * wq;
        const auto it = tf[d].find(term);
        if (it != tf[d].end()) dot += wq * weight(it->second, term);
      }
      for (const auto& [term, count] : tf[d]) {
        const double wd = weight(count, term);
        dnorm += wd * wd;
      }
      const double denom = std::sqrt(qnorm) * std::sqrt(dnorm);
      score = denom > 0.0 ? dot / denom : 0.0;
    }
    if (score > 0.0) scored.push_back({docs[d].first, score});
  }
  return take(std::move(scored), k);
}

citepred::RankedList cosine_full_scan(const std::vector<std::string>& ids,
                                      const std::vector<Eigen::VectorXf>& vectors,
                                      const Eigen::VectorXf& query, std::size_t k) {
  const Eigen::VectorXd q = query.cast<double>();
  std::vector<citepred::ScoredDoc> scored;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Eigen::VectorXd v = vectors[i].cast<double>();
    double dot = 0.0, vv = 0.0, qq = 0.0;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      dot += v[j] * q[j];
      vv += v[j] * v[j];
      qq += q[j] * q[j];
    }
    scored.push_back({ids[i], dot / (std::sqrt(vv) * std::sqrt(qq))});
  }
  return take(std::move(scored), k);
}

citepred::RankedList rrf(const std::vector<citepred::RankedList>& lists, double c, std::size_t k) {
  std::set<std::string> all;
  for (const auto& l : lists) {
    for (const auto& e : l.entries) all.insert(e.id);
  }
  std::vector<citepred::ScoredDoc> scored;
  for (const auto& id : all) {
    double score = 0.0;
    for (const auto& l : lists) {
      for (std::size_t r = 0; r < l.entries.size(); ++r) {
        if (l.entries[r].id == id) score += 1.0 / (c + static_cast<double>(r + 1));
      }
    }
    scored.push_back({id, score});
  }
  return take(std::move(scored), k);
}

}  // namespace oracle
