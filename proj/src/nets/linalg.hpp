#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace pgr::nets {

// Samples are columns: a Dense maps (in x B) -> (out x B).
template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
MatX<S> tanh_of(const MatX<S>& x) {
  return x.array().tanh().matrix();
}

// Gradient through tanh given the cached tanh output t.
template <class S>
MatX<S> tanh_backward(const MatX<S>& t, const MatX<S>& dy) {
  return dy.cwiseProduct((MatX<S>::Ones(t.rows(), t.cols()) -
                          t.cwiseProduct(t)));
}

template <class S>
struct Dense {
  MatX<S> W;   // out x in
  MatX<S> b;   // out x 1
  MatX<S> gW;
  MatX<S> gb;

  void init(Rng& rng, int out, int in) {
    W.resize(out, in);
    b = MatX<S>::Zero(out, 1);
    const double s = 1.0 / std::sqrt(double(in));
    for (int c = 0; c < in; ++c)
      for (int r = 0; r < out; ++r)
        W(r, c) = S(rng.uniform(-s, s));
    zero_grad();
  }

  void zero_grad() {
    gW = MatX<S>::Zero(W.rows(), W.cols());
    gb = MatX<S>::Zero(b.rows(), 1);
  }

  MatX<S> forward(const MatX<S>& x) const {
    return (W * x).colwise() + b.col(0);
  }

  // Accumulates parameter grads; x is the input that produced dy's forward.
  MatX<S> backward(const MatX<S>& x, const MatX<S>& dy) {
    gW.noalias() += dy * x.transpose();
    gb.col(0).noalias() += dy.rowwise().sum();
    return W.transpose() * dy;
  }
};

// Two-layer head: out = B(tanh(A(x))). Caches live with the caller so the
// weights stay immutable during inference.
template <class S>
struct Mlp2Cache {
  MatX<S> x;
  MatX<S> t;  // tanh output of the hidden layer
};

template <class S>
MatX<S> mlp2_forward(const Dense<S>& a, const Dense<S>& b, const MatX<S>& x,
                     Mlp2Cache<S>* cache = nullptr) {
  MatX<S> t = tanh_of<S>(a.forward(x));
  MatX<S> y = b.forward(t);
  if (cache) {
    cache->x = x;
    cache->t = std::move(t);
  }
  return y;
}

template <class S>
MatX<S> mlp2_backward(Dense<S>& a, Dense<S>& b, const Mlp2Cache<S>& cache,
                      const MatX<S>& dy) {
  const MatX<S> dt = b.backward(cache.t, dy);
  return a.backward(cache.x, tanh_backward<S>(cache.t, dt));
}

template <class S>
S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

// Adam over a flat list of parameter/gradient pairs.
template <class S>
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double b1 = 0.9, double b2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), b1_(b1), b2_(b2), eps_(eps) {}

  void step(std::vector<std::pair<MatX<S>*, MatX<S>*>>& params) {
    if (m_.empty()) {
      for (auto& [p, g] : params) {
        m_.push_back(MatX<S>::Zero(p->rows(), p->cols()));
        v_.push_back(MatX<S>::Zero(p->rows(), p->cols()));
      }
    }
    ++t_;
    const S c1 = S(1.0 - std::pow(b1_, t_));
    const S c2 = S(1.0 - std::pow(b2_, t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& [p, g] = params[i];
      m_[i] = S(b1_) * m_[i] + S(1 - b1_) * (*g);
      v_[i] = S(b2_) * v_[i] + S(1 - b2_) * g->cwiseProduct(*g);
      p->array() -= S(lr_) * (m_[i].array() / c1) /
                    ((v_[i].array() / c2).sqrt() + S(eps_));
    }
  }

 private:
  double lr_, b1_, b2_, eps_;
  int t_ = 0;
  std::vector<MatX<S>> m_, v_;
};

}  // namespace pgr::nets
