#include "nbhl/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nbhl/centrality.hpp"

namespace nbhl {

void fuse_scores(const std::vector<double>& W, const std::vector<int>& T, double alpha,
                 std::vector<double>& W_norm, std::vector<double>& T_norm,
                 std::vector<double>& H) {
  const std::size_t c = W.size();
  if (c == 0 || T.size() != c) throw std::invalid_argument("fuse_scores: malformed inputs");

  W_norm.assign(c, 0.0);
  T_norm.assign(c, 0.0);
  H.assign(c, 0.0);

  double sum_w = 0.0;
  for (double w : W) sum_w += 1.0 - w;
  if (sum_w > 0.0)
    for (std::size_t i = 0; i < c; ++i) W_norm[i] = (1.0 - W[i]) / sum_w;
  else
    for (std::size_t i = 0; i < c; ++i) W_norm[i] = 1.0 / static_cast<double>(c);

  long long sum_t = 0;
  for (int t : T) sum_t += t;
  if (sum_t > 0)
    for (std::size_t i = 0; i < c; ++i)
      T_norm[i] = static_cast<double>(T[i]) / static_cast<double>(sum_t);
  else
    for (std::size_t i = 0; i < c; ++i) T_norm[i] = 1.0 / static_cast<double>(c);

  // With both arrays normalized the fused denominator is identically 1, so
  // the division is omitted; this keeps alpha=1 -> H=W^n and alpha=0 -> H=T^n
  // exact.
  for (std::size_t i = 0; i < c; ++i) H[i] = alpha * W_norm[i] + (1.0 - alpha) * T_norm[i];
}

int decide(const std::vector<double>& H, const std::vector<int>& T) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(H.size()); ++i) {
    if (H[i] > H[best] || (H[i] == H[best] && T[i] > T[best])) best = i;
  }
  return best;
}

namespace {

// Component adjacency plus the probe as one extra local node wired to its
// class-c links.
AdjacencyList augmented_adjacency(const ClassComponent& comp, const std::vector<int>& links) {
  AdjacencyList adj = comp.adjacency;
  const int probe_local = static_cast<int>(adj.size());
  adj.push_back(links);
  for (int l : links) adj[l].push_back(probe_local);
  return adj;
}

}  // namespace

ScoredProbe score_probe(const TrainedModel& model, const Instance& x) {
  if (model.components.empty()) throw std::invalid_argument("score: model is not trained");
  ScoredProbe result;
  result.probe = insert_probe(model, x);

  const std::size_t n_classes = model.classes.size();
  ClassScores& s = result.scores;
  s.W.assign(n_classes, 0.0);
  s.T.assign(n_classes, 0);

  // Classes are independent; each iteration only touches its own slot.
#pragma omp parallel for schedule(dynamic)
  for (int ci = 0; ci < static_cast<int>(n_classes); ++ci) {
    const auto& comp = model.components[ci];
    const auto& links = result.probe.class_links[ci];
    const AdjacencyList adj = augmented_adjacency(comp, links);
    const std::vector<double> B = betweenness(adj);

    const int probe_local = static_cast<int>(comp.adjacency.size());
    s.T[ci] = static_cast<int>(links.size());

    // A probe on no geodesic of this component (betweenness exactly zero)
    // carries no structural evidence for the class: comparing zero against
    // the members' low-betweenness tail would reward sparse components
    // regardless of fit. Such probes take the maximal difference score.
    if (B[probe_local] == 0.0) {
      s.W[ci] = 1.0;
      continue;
    }

    std::vector<double> diffs(comp.adjacency.size());
    for (std::size_t j = 0; j < comp.adjacency.size(); ++j) {
      const double d = B[probe_local] - B[j];
      diffs[j] = model.params.signed_differences ? d : std::fabs(d);
    }
    std::sort(diffs.begin(), diffs.end());

    const std::size_t pool = std::min<std::size_t>(model.params.b, diffs.size());
    double total = 0.0;
    for (std::size_t j = 0; j < pool; ++j) total += diffs[j];
    s.W[ci] = pool > 0 ? total / static_cast<double>(pool) : 0.0;
  }

  fuse_scores(s.W, s.T, model.params.alpha, s.W_norm, s.T_norm, s.H);
  s.decided_index = decide(s.H, s.T);
  s.decided = model.classes[s.decided_index];
  return result;
}

ClassScores score(const TrainedModel& model, const Instance& x) {
  return score_probe(model, x).scores;
}

std::string predict(TrainedModel& model, const Instance& x, PredictMode mode) {
  ScoredProbe sp = score_probe(model, x);
  if (mode == PredictMode::growth) attach(model, sp.probe, sp.scores.decided);
  return sp.scores.decided;
}

std::vector<std::string> predict_batch(TrainedModel& model, const std::vector<Instance>& xs,
                                       PredictMode mode) {
  std::vector<std::string> out(xs.size());
  if (mode == PredictMode::growth) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict(model, xs[i], mode);
  } else {
    const TrainedModel& shared = model;
    std::string first_error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
      try {
        out[i] = score(shared, xs[i]).decided;
      } catch (const std::exception& err) {
#pragma omp critical
        if (first_error.empty()) first_error = err.what();
      }
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);
  }
  return out;
}

}  // namespace nbhl
