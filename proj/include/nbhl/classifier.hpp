#pragma once

#include <string>
#include <vector>

#include "nbhl/graph.hpp"

namespace nbhl {

// Per-class scoring of one probe: W holds the mean of the b smallest
// betweenness differences, T the probe's link counts, H the fused class
// probabilities.
struct ClassScores {
  std::vector<double> W;
  std::vector<int> T;
  std::vector<double> W_norm;
  std::vector<double> T_norm;
  std::vector<double> H;
  int decided_index = -1;
  std::string decided;
};

// W^n = (1-W)/sum(1-W), T^n = T/sum(T), H = alpha*W^n + (1-alpha)*T^n.
// Degenerate sums (all W at 1, or no links anywhere) fall back to uniform so
// H stays a valid distribution. With the inputs normalized, the fused vector
// already sums to one, which keeps the alpha endpoints exact identities.
void fuse_scores(const std::vector<double>& W, const std::vector<int>& T, double alpha,
                 std::vector<double>& W_norm, std::vector<double>& T_norm,
                 std::vector<double>& H);

// argmax over H; ties go to the larger link count T, remaining ties to the
// lower class declaration index.
int decide(const std::vector<double>& H, const std::vector<int>& T);

// Scores a probe against every class: inserts it into each component with its
// class-c links, recomputes betweenness of the augmented component, forms the
// sorted difference list against the existing members, and fuses W/T into H.
// Never mutates the model.
ClassScores score(const TrainedModel& model, const Instance& x);

enum class PredictMode { growth, stateless };

// As score(), exposing the probe so callers can attach it.
struct ScoredProbe {
  ClassScores scores;
  InsertionProbe probe;
};
ScoredProbe score_probe(const TrainedModel& model, const Instance& x);

// Returns the decided class. Growth mode attaches the probe permanently to
// the winning component; stateless mode leaves the model untouched.
std::string predict(TrainedModel& model, const Instance& x, PredictMode mode);

// Growth mode processes instances sequentially in the given order (later
// decisions see earlier attachments); stateless mode is order-independent and
// scores instances concurrently.
std::vector<std::string> predict_batch(TrainedModel& model, const std::vector<Instance>& xs,
                                       PredictMode mode);

}  // namespace nbhl
