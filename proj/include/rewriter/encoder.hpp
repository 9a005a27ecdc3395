#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rewriter/cost.hpp"
#include "rewriter/plan.hpp"

namespace rewriter::enc {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  static Tensor zeros(std::vector<std::size_t> shape);
  std::size_t size() const { return data.size(); }
};

struct EncoderConfig {
  std::size_t text_dim{32};     // hashed condition-text buckets
  std::size_t stat_hidden{8};   // affine+tanh lift of the 2 stat features
  std::size_t d_model{64};
  std::size_t heads{4};
  std::size_t layers{2};
  std::size_t ff_dim{128};

  std::size_t feature_dim() const { return 8 + text_dim + stat_hidden; }
  std::size_t head_dim() const { return d_model / heads; }
};

struct LayerParams {
  Tensor wq, wk, wv, wo;      // d_model x d_model
  Tensor bq, bk, bv, bo;      // d_model
  Tensor lambda;              // heads; distance bias is softplus(lambda)
  Tensor w1, b1, w2, b2;      // ff_dim x d_model, ff_dim, d_model x ff_dim, d_model
};

struct EncoderParams {
  EncoderConfig config;
  std::uint64_t seed{0};
  Tensor ws, bs;              // stat_hidden x 2, stat_hidden
  Tensor wp, bp;              // d_model x feature_dim, d_model
  std::vector<LayerParams> layer;

  std::size_t parameter_count() const;
};

// Seeded Xavier-uniform initialization; lambda starts at 0.
EncoderParams init_params(const EncoderConfig& config, std::uint64_t seed);

// Stable tensor enumeration (used by the optimizer, serialization and
// gradient checks).
void for_each_tensor(EncoderParams& p,
                     const std::function<void(const std::string&, Tensor&)>& fn);
void for_each_tensor(const EncoderParams& p,
                     const std::function<void(const std::string&, const Tensor&)>& fn);

struct NodeFeatures {
  std::vector<double> op_onehot;   // 8, exactly one 1
  std::vector<double> cond_text;   // text_dim, L2-normalized counts or zero
  std::vector<double> stats;       // [log1p(rows), log1p(cumulative cost)]
};

// One NodeFeatures per node in preorder. Throws AlignmentError when the
// report does not line up with the tree.
std::vector<NodeFeatures> featurize(const QueryTree& tree,
                                    const CostReport& report,
                                    std::size_t text_dim);

// Everything encode() needs, precomputed once per query.
struct EncoderInput {
  std::vector<NodeFeatures> nodes;
  std::vector<std::vector<int>> hops;  // undirected node distance, preorder
};

EncoderInput prepare_input(const QueryTree& tree, const CostReport& report,
                           const EncoderConfig& config);

// Distance-biased attention encoder: unit-norm d_model embedding.
std::vector<double> encode(const EncoderParams& params, const EncoderInput& in);

struct InputTriplet {
  EncoderInput anchor, positive, negative;
};

struct EncoderGrads {
  EncoderParams tensors;  // same shapes, gradient values
};

struct LossResult {
  double loss{0.0};
  EncoderParams grads;    // same tensor layout as the parameters
};

// In-batch contrastive loss: for triplet i the positive is h_i+, the
// denominator runs over every positive and negative in the batch,
// temperature tau. Returns the mean loss and its gradients.
LossResult contrastive_loss(const EncoderParams& params,
                            const std::vector<InputTriplet>& batch, double tau);

double contrastive_loss_value(const EncoderParams& params,
                              const std::vector<InputTriplet>& batch,
                              double tau);

// sim(E(Q),E(Q+)) - sim(E(Q),E(Q-)) + 1, in [-1, 3].
double confidence(const EncoderParams& params, const InputTriplet& triplet);

}  // namespace rewriter::enc
