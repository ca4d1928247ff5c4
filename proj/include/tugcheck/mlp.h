// Copyright 2026 The tugcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Fully connected ReLU network with a linear output layer. Output
// squashing (sigmoid / tanh heads) belongs to the callers, which also own
// the loss gradients with respect to the raw outputs.

#ifndef TUGCHECK_MLP_H_
#define TUGCHECK_MLP_H_

#include <Eigen/Dense>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace tugcheck {

using Matrix = Eigen::MatrixXf;
using Vector = Eigen::VectorXf;

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
  bool operator==(const DenseLayer& o) const {
    return weight == o.weight && bias == o.bias;
  }
};

class Mlp {
 public:
  Mlp() = default;
  // sizes = {input, hidden..., output}. He-uniform initialization.
  Mlp(const std::vector<int>& sizes, std::mt19937_64& rng);

  int input_size() const { return static_cast<int>(layers_.front().weight.cols()); }
  int output_size() const { return static_cast<int>(layers_.back().weight.rows()); }
  std::vector<int> sizes() const;

  // Samples are columns. Returns raw outputs.
  Matrix Forward(const Matrix& x) const;

  struct Tape {
    std::vector<Matrix> inputs;  // input of each layer
  };
  Matrix Forward(const Matrix& x, Tape* tape) const;

  struct Gradients {
    std::vector<Matrix> weight;
    std::vector<Vector> bias;
  };
  // d_out is the gradient of the loss w.r.t. the raw outputs.
  Gradients Backward(const Tape& tape, const Matrix& d_out) const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  bool AllFinite() const;
  bool operator==(const Mlp& o) const { return layers_ == o.layers_; }

 private:
  std::vector<DenseLayer> layers_;
};

class Adam {
 public:
  explicit Adam(const Mlp& net, float learning_rate = 1e-3f, float beta1 = 0.9f,
                float beta2 = 0.999f, float epsilon = 1e-8f);
  void Step(Mlp& net, const Mlp::Gradients& grads);

 private:
  float lr_, beta1_, beta2_, eps_;
  long step_ = 0;
  std::vector<Matrix> m_w_, v_w_;
  std::vector<Vector> m_b_, v_b_;
};

// Versioned text tensor list: a header, a layer-shape manifest, then one
// tensor per line in hexadecimal floating point so reloads are bit-exact.
//
//   tugcheck-weights 1
//   kind <kind>
//   manifest <n> <rows>x<cols> ...
//   w0 <rows>x<cols> <values row-major>
//   b0 <rows>x1 <values>
//   ...
void SaveWeights(const Mlp& net, const std::string& kind, std::ostream& out);
Mlp LoadWeights(std::istream& in, std::string* kind);
void SaveWeightsFile(const Mlp& net, const std::string& kind, const std::string& path);
Mlp LoadWeightsFile(const std::string& path, std::string* kind);

}  // namespace tugcheck

#endif  // TUGCHECK_MLP_H_
