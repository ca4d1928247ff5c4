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

#include "tugcheck/mlp.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tugcheck/common.h"

namespace tugcheck {

Mlp::Mlp(const std::vector<int>& sizes, std::mt19937_64& rng) {
  if (sizes.size() < 2) throw Error("an MLP needs at least input and output sizes");
  for (size_t i = 0; i + 1 < sizes.size(); ++i) {
    const int in = sizes[i];
    const int out = sizes[i + 1];
    const float limit = std::sqrt(6.0f / static_cast<float>(in));
    std::uniform_real_distribution<float> dist(-limit, limit);
    DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layer.weight(r, c) = dist(rng);
    }
    layers_.push_back(std::move(layer));
  }
}

std::vector<int> Mlp::sizes() const {
  std::vector<int> out;
  if (layers_.empty()) return out;
  out.push_back(input_size());
  for (const auto& l : layers_) out.push_back(static_cast<int>(l.weight.rows()));
  return out;
}

Matrix Mlp::Forward(const Matrix& x) const { return Forward(x, nullptr); }

Matrix Mlp::Forward(const Matrix& x, Tape* tape) const {
  if (tape) tape->inputs.clear();
  Matrix h = x;
  for (size_t i = 0; i < layers_.size(); ++i) {
    if (tape) tape->inputs.push_back(h);
    Matrix z = layers_[i].weight * h;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) z = z.cwiseMax(0.0f);
    h = std::move(z);
  }
  return h;
}

Mlp::Gradients Mlp::Backward(const Tape& tape, const Matrix& d_out) const {
  Gradients g;
  g.weight.resize(layers_.size());
  g.bias.resize(layers_.size());
  Matrix delta = d_out;
  for (size_t k = layers_.size(); k-- > 0;) {
    const Matrix& input = tape.inputs[k];
    g.weight[k] = delta * input.transpose();
    g.bias[k] = delta.rowwise().sum();
    if (k > 0) {
      Matrix back = layers_[k].weight.transpose() * delta;
      // The input of layer k is the ReLU output of layer k-1.
      delta = (input.array() > 0.0f).select(back, 0.0f);
    }
  }
  return g;
}

bool Mlp::AllFinite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

Adam::Adam(const Mlp& net, float learning_rate, float beta1, float beta2, float epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (const auto& l : net.layers()) {
    m_w_.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    v_w_.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    m_b_.push_back(Vector::Zero(l.bias.size()));
    v_b_.push_back(Vector::Zero(l.bias.size()));
  }
}

void Adam::Step(Mlp& net, const Mlp::Gradients& grads) {
  ++step_;
  const float c1 = 1.0f - std::pow(beta1_, static_cast<float>(step_));
  const float c2 = 1.0f - std::pow(beta2_, static_cast<float>(step_));
  auto& layers = net.layers();
  for (size_t k = 0; k < layers.size(); ++k) {
    m_w_[k] = beta1_ * m_w_[k] + (1.0f - beta1_) * grads.weight[k];
    v_w_[k] = beta2_ * v_w_[k] + (1.0f - beta2_) * grads.weight[k].cwiseAbs2();
    layers[k].weight.array() -=
        lr_ * (m_w_[k].array() / c1) / ((v_w_[k].array() / c2).sqrt() + eps_);
    m_b_[k] = beta1_ * m_b_[k] + (1.0f - beta1_) * grads.bias[k];
    v_b_[k] = beta2_ * v_b_[k] + (1.0f - beta2_) * grads.bias[k].cwiseAbs2();
    layers[k].bias.array() -=
        lr_ * (m_b_[k].array() / c1) / ((v_b_[k].array() / c2).sqrt() + eps_);
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kMagic = "tugcheck-weights";
constexpr int kVersion = 1;

void WriteTensor(std::ostream& out, const std::string& name, const float* data,
                 long rows, long cols) {
  out << name << ' ' << rows << 'x' << cols;
  char buf[64];
  for (long i = 0; i < rows * cols; ++i) {
    auto res = std::to_chars(buf, buf + sizeof(buf), data[i], std::chars_format::hex);
    out << ' ' << std::string_view(buf, res.ptr - buf);
  }
  out << '\n';
}

std::vector<float> ReadTensor(std::istream& in, const std::string& name, long rows,
                              long cols) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("weights: missing tensor " + name);
  std::istringstream ls(line);
  std::string got_name, shape;
  ls >> got_name >> shape;
  const std::string want_shape = std::to_string(rows) + "x" + std::to_string(cols);
  if (got_name != name || shape != want_shape) {
    throw FormatError("weights: expected tensor " + name + " " + want_shape + ", got " +
                      got_name + " " + shape);
  }
  std::vector<float> values(rows * cols);
  std::string tok;
  for (long i = 0; i < rows * cols; ++i) {
    if (!(ls >> tok)) throw FormatError("weights: tensor " + name + " is truncated");
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), values[i],
                               std::chars_format::hex);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw FormatError("weights: bad value '" + tok + "' in " + name);
    }
  }
  return values;
}

}  // namespace

void SaveWeights(const Mlp& net, const std::string& kind, std::ostream& out) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "kind " << kind << '\n';
  out << "manifest " << net.layers().size();
  for (const auto& l : net.layers()) out << ' ' << l.weight.rows() << 'x' << l.weight.cols();
  out << '\n';
  for (size_t k = 0; k < net.layers().size(); ++k) {
    const auto& l = net.layers()[k];
    // Row-major order for readability.
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = l.weight;
    WriteTensor(out, "w" + std::to_string(k), w.data(), w.rows(), w.cols());
    WriteTensor(out, "b" + std::to_string(k), l.bias.data(), l.bias.size(), 1);
  }
}

Mlp LoadWeights(std::istream& in, std::string* kind) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("weights: empty input");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != kMagic) throw FormatError("weights: bad header '" + line + "'");
    if (version != kVersion) {
      throw FormatError("weights: unsupported version " + std::to_string(version));
    }
  }
  if (!std::getline(in, line) || line.rfind("kind ", 0) != 0) {
    throw FormatError("weights: missing kind line");
  }
  if (kind) *kind = line.substr(5);
  if (!std::getline(in, line) || line.rfind("manifest ", 0) != 0) {
    throw FormatError("weights: missing manifest line");
  }
  std::istringstream ms(line.substr(9));
  size_t n = 0;
  ms >> n;
  std::vector<std::pair<long, long>> shapes;
  for (size_t k = 0; k < n; ++k) {
    std::string shape;
    ms >> shape;
    auto x = shape.find('x');
    if (x == std::string::npos) throw FormatError("weights: bad shape '" + shape + "'");
    shapes.emplace_back(std::stol(shape.substr(0, x)), std::stol(shape.substr(x + 1)));
  }
  if (shapes.empty()) throw FormatError("weights: empty manifest");
  Mlp net;
  for (size_t k = 0; k < shapes.size(); ++k) {
    auto [rows, cols] = shapes[k];
    if (k > 0 && cols != shapes[k - 1].first) {
      throw FormatError("weights: manifest shapes do not chain");
    }
    auto w = ReadTensor(in, "w" + std::to_string(k), rows, cols);
    auto b = ReadTensor(in, "b" + std::to_string(k), rows, 1);
    DenseLayer layer;
    layer.weight = Eigen::Map<Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(w.data(), rows, cols);
    layer.bias = Eigen::Map<Vector>(b.data(), rows);
    net.layers().push_back(std::move(layer));
  }
  return net;
}

void SaveWeightsFile(const Mlp& net, const std::string& kind, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write weights file '" + path + "'");
  SaveWeights(net, kind, out);
}

Mlp LoadWeightsFile(const std::string& path, std::string* kind) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open weights file '" + path + "'");
  return LoadWeights(in, kind);
}

}  // namespace tugcheck
