#pragma once

#include <span>
#include <vector>

#include "pk/matrix.hpp"
#include "pk/rng.hpp"

namespace pk {

/// Feedforward network with tanh hidden layers and a linear output layer.
/// Parameters flatten layer by layer, each weight matrix row-major followed
/// by its bias, which fixes the gradient layout used across the project.
struct MlpParams {
  std::vector<int> sizes;  // input, hidden..., output
  std::vector<Matrix> w;   // w[l] has shape sizes[l+1] x sizes[l]
  std::vector<Vec> b;

  int layer_count() const { return static_cast<int>(w.size()); }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  int param_count() const;

  Vec flatten() const;
  void assign(std::span<const double> flat);
};

enum class MlpInit {
  kXavier,      // uniform +-sqrt(6/(fan_in+fan_out)) everywhere
  kZeroOutput,  // hidden uniform +-scale, final layer exactly zero
};

MlpParams make_mlp(const std::vector<int>& sizes, MlpInit init, RngStream& rng,
                   double hidden_scale = 1e-2);

/// Post-activation values per layer; act[0] is the input itself.
struct MlpActivations {
  std::vector<Vec> act;
};

Vec mlp_forward(const MlpParams& p, std::span<const double> input, MlpActivations* cache = nullptr);

struct MlpGrads {
  std::vector<Matrix> dw;
  std::vector<Vec> db;
  Vec dinput;

  Vec flatten() const;
};

/// Exact reverse accumulation for the scalar loss <output_grad, output>.
MlpGrads mlp_backward(const MlpParams& p, const MlpActivations& cache,
                      std::span<const double> output_grad);

/// Batched variants: rows are samples.
struct MlpBatchActivations {
  std::vector<Matrix> act;
};

Matrix mlp_forward_batch(const MlpParams& p, const Matrix& input,
                         MlpBatchActivations* cache = nullptr);

struct MlpBatchGrads {
  std::vector<Matrix> dw;
  std::vector<Vec> db;
  Matrix dinput;

  Vec flatten() const;
};

MlpBatchGrads mlp_backward_batch(const MlpParams& p, const MlpBatchActivations& cache,
                                 const Matrix& output_grad);

/// Adam over a flat parameter vector.
class Adam {
 public:
  Adam(int dim, double lr) : lr_(lr), m_(dim, 0.0), v_(dim, 0.0) {}

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  void step(Vec& params, std::span<const double> grad);

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int t_ = 0;
  Vec m_, v_;
};

/// Scales grad in place so its global norm is at most max_norm.
void clip_global_norm(Vec& grad, double max_norm);

}  // namespace pk
