/*
 * Copyright 2026 The lowfake Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lowfake/nn/ops.hpp"

#include "fast_activations.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <type_traits>

namespace lowfake::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using CMapMat = Eigen::Map<const RowMat<T>>;
template <typename T>
using CMapRow = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;

void require_rank(const Shape& s, std::size_t rank, const char* what) {
  if (s.size() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_str(s));
  }
}

struct ConvGeometry {
  std::size_t n, h, w, cin, cout, k, dilation, pad;
  std::size_t patch() const { return k * k * cin; }
  std::size_t pixels() const { return h * w; }
};

template <typename T>
ConvGeometry conv_geometry(const Tensor<T>& x, const Tensor<T>& kernel, std::size_t dilation) {
  require_rank(x.shape(), 4, "conv2d input");
  require_rank(kernel.shape(), 4, "conv2d kernel");
  const Shape& ks = kernel.shape();
  if (ks[0] != ks[1]) throw ShapeError("conv2d kernel must be square");
  if (ks[2] != x.dim(3)) {
    throw ShapeError("conv2d kernel " + shape_str(ks) + " does not match input " + shape_str(x.shape()));
  }
  if (dilation == 0) throw ShapeError("conv2d dilation must be positive");
  const std::size_t k = ks[0];
  return {x.dim(0), x.dim(1), x.dim(2), x.dim(3), ks[3], k, dilation, (k - 1) * dilation / 2};
}

// One sample (H, W, Cin) -> (H*W, k*k*Cin), zero outside the image.
template <typename T>
void im2col(const T* img, const ConvGeometry& g, T* cols) {
  const std::size_t patch = g.patch();
  for (std::size_t oy = 0; oy < g.h; ++oy) {
    for (std::size_t ox = 0; ox < g.w; ++ox) {
      T* row = cols + (oy * g.w + ox) * patch;
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky * g.dilation) -
                                  static_cast<std::ptrdiff_t>(g.pad);
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx * g.dilation) -
                                    static_cast<std::ptrdiff_t>(g.pad);
          T* dst = row + (ky * g.k + kx) * g.cin;
          if (iy < 0 || ix < 0 || iy >= static_cast<std::ptrdiff_t>(g.h) ||
              ix >= static_cast<std::ptrdiff_t>(g.w)) {
            std::fill(dst, dst + g.cin, T(0));
          } else {
            const T* src = img + (static_cast<std::size_t>(iy) * g.w + static_cast<std::size_t>(ix)) * g.cin;
            std::copy(src, src + g.cin, dst);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* cols, const ConvGeometry& g, T* img) {
  const std::size_t patch = g.patch();
  for (std::size_t oy = 0; oy < g.h; ++oy) {
    for (std::size_t ox = 0; ox < g.w; ++ox) {
      const T* row = cols + (oy * g.w + ox) * patch;
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky * g.dilation) -
                                  static_cast<std::ptrdiff_t>(g.pad);
        if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx * g.dilation) -
                                    static_cast<std::ptrdiff_t>(g.pad);
          if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w)) continue;
          const T* src = row + (ky * g.k + kx) * g.cin;
          T* dst = img + (static_cast<std::size_t>(iy) * g.w + static_cast<std::size_t>(ix)) * g.cin;
          for (std::size_t c = 0; c < g.cin; ++c) dst[c] += src[c];
        }
      }
    }
  }
}

template <typename T>
std::size_t channels_of(const Tensor<T>& x) {
  if (x.rank() < 2) throw ShapeError("expected a batched tensor, got " + shape_str(x.shape()));
  return x.shape().back();
}

}  // namespace

// ---- convolution ----------------------------------------------------------------

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias,
                         std::size_t dilation) {
  const ConvGeometry g = conv_geometry(x, kernel, dilation);
  if (bias.size() != g.cout) throw ShapeError("conv2d bias does not match filter count");
  Tensor<T> y({g.n, g.h, g.w, g.cout});
  CMapMat<T> K(kernel.raw(), g.patch(), g.cout);
  CMapRow<T> b(bias.raw(), g.cout);
  const bool pointwise = g.k == 1;
  std::vector<T> cols(pointwise ? 0 : g.pixels() * g.patch());
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* img = x.raw() + n * g.pixels() * g.cin;
    const T* src = img;
    if (!pointwise) {
      im2col(img, g, cols.data());
      src = cols.data();
    }
    CMapMat<T> C(src, g.pixels(), g.patch());
    MapMat<T> Y(y.raw() + n * g.pixels() * g.cout, g.pixels(), g.cout);
    Y.noalias() = C * K;
    Y.rowwise() += b;
  }
  return y;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& kernel, std::size_t dilation,
                               const Tensor<T>& grad_out, bool need_input_grad) {
  const ConvGeometry g = conv_geometry(x, kernel, dilation);
  if (grad_out.shape() != Shape{g.n, g.h, g.w, g.cout}) {
    throw ShapeError("conv2d grad " + shape_str(grad_out.shape()) + " does not match output");
  }
  Conv2dGrads<T> out{need_input_grad ? Tensor<T>(x.shape()) : Tensor<T>(), Tensor<T>(kernel.shape()),
                     Tensor<T>({g.cout})};
  CMapMat<T> K(kernel.raw(), g.patch(), g.cout);
  MapMat<T> gK(out.kernel.raw(), g.patch(), g.cout);
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>> gb(out.bias.raw(), g.cout);
  const bool pointwise = g.k == 1;
  std::vector<T> cols(pointwise ? 0 : g.pixels() * g.patch());
  RowMat<T> gcols;
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* img = x.raw() + n * g.pixels() * g.cin;
    const T* src = img;
    if (!pointwise) {
      im2col(img, g, cols.data());
      src = cols.data();
    }
    CMapMat<T> C(src, g.pixels(), g.patch());
    CMapMat<T> gY(grad_out.raw() + n * g.pixels() * g.cout, g.pixels(), g.cout);
    gK.noalias() += C.transpose() * gY;
    gb += gY.colwise().sum();
    if (need_input_grad) {
      T* gimg = out.input.raw() + n * g.pixels() * g.cin;
      if (pointwise) {
        MapMat<T> gX(gimg, g.pixels(), g.cin);
        gX.noalias() = gY * K.transpose();
      } else {
        gcols.noalias() = gY * K.transpose();
        col2im_add(gcols.data(), g, gimg);
      }
    }
  }
  return out;
}

// ---- dense ------------------------------------------------------------------------

template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& bias) {
  require_rank(x.shape(), 2, "dense input");
  require_rank(kernel.shape(), 2, "dense kernel");
  const std::size_t n = x.dim(0), in = x.dim(1), units = kernel.dim(1);
  if (kernel.dim(0) != in || bias.size() != units) {
    throw ShapeError("dense kernel " + shape_str(kernel.shape()) + " does not match input " +
                     shape_str(x.shape()));
  }
  Tensor<T> y({n, units});
  MapMat<T> Y(y.raw(), n, units);
  Y.noalias() = CMapMat<T>(x.raw(), n, in) * CMapMat<T>(kernel.raw(), in, units);
  Y.rowwise() += CMapRow<T>(bias.raw(), units);
  return y;
}

template <typename T>
DenseGrads<T> dense_backward(const Tensor<T>& x, const Tensor<T>& kernel, const Tensor<T>& grad_out,
                             bool need_input_grad) {
  const std::size_t n = x.dim(0), in = x.dim(1), units = kernel.dim(1);
  if (grad_out.shape() != Shape{n, units}) throw ShapeError("dense grad does not match output");
  DenseGrads<T> out{need_input_grad ? Tensor<T>({n, in}) : Tensor<T>(), Tensor<T>(kernel.shape()),
                    Tensor<T>({units})};
  CMapMat<T> X(x.raw(), n, in);
  CMapMat<T> W(kernel.raw(), in, units);
  CMapMat<T> gY(grad_out.raw(), n, units);
  MapMat<T>(out.kernel.raw(), in, units).noalias() = X.transpose() * gY;
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(out.bias.raw(), units) = gY.colwise().sum();
  if (need_input_grad) MapMat<T>(out.input.raw(), n, in).noalias() = gY * W.transpose();
  return out;
}

// ---- batch normalization ------------------------------------------------------------

template <typename T>
Tensor<T> batchnorm_train(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                          BatchNormCache<T>& cache, double eps) {
  const std::size_t c = channels_of(x);
  if (gamma.size() != c || beta.size() != c) throw ShapeError("batchnorm parameters do not match channels");
  const std::size_t m = x.size() / c;
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(c);
  CMapMat<T> X(x.raw(), rows, cols);

  // Blocked sums: each block in T, blocks combined in double.
  constexpr Eigen::Index kBlock = 1024;
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(cols);
  for (Eigen::Index r = 0; r < rows; r += kBlock) {
    const Eigen::Index len = std::min(kBlock, rows - r);
    sum += X.middleRows(r, len).colwise().sum().transpose().template cast<double>().array();
  }
  const Eigen::ArrayXd mean = sum / static_cast<double>(m);
  const Eigen::Matrix<T, 1, Eigen::Dynamic> mean_t = mean.cast<T>().matrix().transpose();
  Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(cols);
  for (Eigen::Index r = 0; r < rows; r += kBlock) {
    const Eigen::Index len = std::min(kBlock, rows - r);
    sq += (X.middleRows(r, len).rowwise() - mean_t)
              .array()
              .square()
              .colwise()
              .sum()
              .transpose()
              .template cast<double>();
  }
  cache.mean.assign(c, T(0));
  cache.variance.assign(c, T(0));
  cache.inv_std.assign(c, T(0));
  Eigen::Matrix<T, 1, Eigen::Dynamic> inv(cols), scale(cols), shift(cols);
  for (std::size_t j = 0; j < c; ++j) {
    const double var = sq[static_cast<Eigen::Index>(j)] / static_cast<double>(m);
    cache.mean[j] = static_cast<T>(mean[static_cast<Eigen::Index>(j)]);
    cache.variance[j] = static_cast<T>(var);
    cache.inv_std[j] = static_cast<T>(1.0 / std::sqrt(var + eps));
    inv[static_cast<Eigen::Index>(j)] = cache.inv_std[j];
    scale[static_cast<Eigen::Index>(j)] = gamma[j];
    shift[static_cast<Eigen::Index>(j)] = beta[j];
  }
  cache.normalized = Tensor<T>(x.shape());
  Tensor<T> y(x.shape());
  MapMat<T> XH(cache.normalized.raw(), rows, cols);
  MapMat<T> Y(y.raw(), rows, cols);
  XH.array() = (X.rowwise() - mean_t).array().rowwise() * inv.array();
  Y.array() = (XH.array().rowwise() * scale.array()).rowwise() + shift.array();
  return y;
}

template <typename T>
Tensor<T> batchnorm_eval(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                         const Tensor<T>& moving_mean, const Tensor<T>& moving_variance, double eps) {
  const std::size_t c = channels_of(x);
  if (gamma.size() != c || beta.size() != c || moving_mean.size() != c || moving_variance.size() != c) {
    throw ShapeError("batchnorm parameters do not match channels");
  }
  std::vector<T> scale(c), shift(c);
  for (std::size_t j = 0; j < c; ++j) {
    scale[j] = static_cast<T>(gamma[j] / std::sqrt(static_cast<double>(moving_variance[j]) + eps));
    shift[j] = beta[j] - moving_mean[j] * scale[j];
  }
  Tensor<T> y(x.shape());
  const std::size_t m = x.size() / c;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < c; ++j) y[i * c + j] = x[i * c + j] * scale[j] + shift[j];
  }
  return y;
}

template <typename T>
BatchNormGrads<T> batchnorm_backward(const BatchNormCache<T>& cache, const Tensor<T>& gamma,
                                     const Tensor<T>& grad_out) {
  const Tensor<T>& xh = cache.normalized;
  if (grad_out.shape() != xh.shape()) throw ShapeError("batchnorm grad does not match output");
  const std::size_t c = channels_of(xh);
  const std::size_t m = xh.size() / c;
  BatchNormGrads<T> out{Tensor<T>(xh.shape()), Tensor<T>({c}), Tensor<T>({c})};
  std::vector<double> gsum(c, 0.0), gdot(c, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t k = i * c + j;
      gsum[j] += grad_out[k];
      gdot[j] += static_cast<double>(grad_out[k]) * xh[k];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < c; ++j) {
    out.beta[j] = static_cast<T>(gsum[j]);
    out.gamma[j] = static_cast<T>(gdot[j]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const std::size_t k = i * c + j;
      const double scale = static_cast<double>(gamma[j]) * cache.inv_std[j];
      out.input[k] = static_cast<T>(
          scale * (grad_out[k] - gsum[j] * inv_m - xh[k] * gdot[j] * inv_m));
    }
  }
  return out;
}

template <typename T>
void batchnorm_update_running(const BatchNormCache<T>& cache, Tensor<T>& moving_mean,
                              Tensor<T>& moving_variance, double momentum) {
  const std::size_t c = cache.mean.size();
  if (moving_mean.size() != c || moving_variance.size() != c) {
    throw ShapeError("batchnorm running statistics do not match channels");
  }
  for (std::size_t j = 0; j < c; ++j) {
    moving_mean[j] = static_cast<T>(momentum * moving_mean[j] + (1.0 - momentum) * cache.mean[j]);
    moving_variance[j] =
        static_cast<T>(momentum * moving_variance[j] + (1.0 - momentum) * cache.variance[j]);
  }
}

// ---- max pooling ----------------------------------------------------------------------

template <typename T>
Tensor<T> maxpool_forward(const Tensor<T>& x, std::size_t pool, std::vector<std::uint32_t>& argmax) {
  require_rank(x.shape(), 4, "maxpool input");
  const std::size_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  if (pool == 0 || h % pool || w % pool) throw ShapeError("maxpool window does not divide input");
  const std::size_t oh = h / pool, ow = w / pool;
  Tensor<T> y({n, oh, ow, c});
  argmax.assign(y.size(), 0);
  std::size_t o = 0;
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t ch = 0; ch < c; ++ch, ++o) {
          std::size_t best = ((b * h + oy * pool) * w + ox * pool) * c + ch;
          T best_v = x[best];
          for (std::size_t py = 0; py < pool; ++py) {
            for (std::size_t px = 0; px < pool; ++px) {
              const std::size_t idx = ((b * h + oy * pool + py) * w + ox * pool + px) * c + ch;
              if (x[idx] > best_v) {
                best_v = x[idx];
                best = idx;
              }
            }
          }
          y[o] = best_v;
          argmax[o] = static_cast<std::uint32_t>(best);
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> maxpool_backward(const Shape& input_shape, const std::vector<std::uint32_t>& argmax,
                           const Tensor<T>& grad_out) {
  if (argmax.size() != grad_out.size()) throw ShapeError("maxpool grad does not match output");
  Tensor<T> gx(input_shape);
  for (std::size_t i = 0; i < argmax.size(); ++i) gx[argmax[i]] += grad_out[i];
  return gx;
}

// ---- elementwise ------------------------------------------------------------------------

template <typename T>
Tensor<T> activation_forward(ActivationKind kind, const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  if constexpr (std::is_same_v<T, float>) {
    detail::activate_f32(kind, x.raw(), y.raw(), x.size());
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = activate(kind, x[i]);
  }
  return y;
}

template <typename T>
ActivationWithGrad<T> activation_forward_with_grad(ActivationKind kind, const Tensor<T>& x) {
  ActivationWithGrad<T> r{Tensor<T>(x.shape()), Tensor<T>(x.shape())};
  if constexpr (std::is_same_v<T, float>) {
    detail::activate_with_grad_f32(kind, x.raw(), r.value.raw(), r.derivative.raw(), x.size());
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.value[i] = activate(kind, x[i]);
      r.derivative[i] = activate_grad(kind, x[i]);
    }
  }
  return r;
}

template <typename T>
Tensor<T> activation_backward(ActivationKind kind, const Tensor<T>& x, const Tensor<T>& grad_out) {
  if (grad_out.shape() != x.shape()) throw ShapeError("activation grad does not match input");
  Tensor<T> gx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) gx[i] = grad_out[i] * activate_grad(kind, x[i]);
  return gx;
}

template <typename T>
Tensor<T> sigmoid_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& y, const Tensor<T>& grad_out) {
  Tensor<T> gx(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) gx[i] = grad_out[i] * y[i] * (T(1) - y[i]);
  return gx;
}

template <typename T>
Tensor<T> softmax_forward(const Tensor<T>& x) {
  const std::size_t c = channels_of(x);
  const std::size_t rows = x.size() / c;
  Tensor<T> y(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.raw() + r * c;
    T* out = y.raw() + r * c;
    const T mx = *std::max_element(in, in + c);
    T sum = 0;
    for (std::size_t j = 0; j < c; ++j) {
      out[j] = std::exp(in[j] - mx);
      sum += out[j];
    }
    for (std::size_t j = 0; j < c; ++j) out[j] /= sum;
  }
  return y;
}

template <typename T>
Tensor<T> softmax_backward(const Tensor<T>& y, const Tensor<T>& grad_out) {
  const std::size_t c = channels_of(y);
  const std::size_t rows = y.size() / c;
  Tensor<T> gx(y.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* p = y.raw() + r * c;
    const T* g = grad_out.raw() + r * c;
    T dot = 0;
    for (std::size_t j = 0; j < c; ++j) dot += p[j] * g[j];
    for (std::size_t j = 0; j < c; ++j) gx[r * c + j] = p[j] * (g[j] - dot);
  }
  return gx;
}

template <typename T>
Tensor<T> multiply(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError("multiply: shapes differ");
  Tensor<T> y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * b[i];
  return y;
}

// ---- channel concat ------------------------------------------------------------------------

template <typename T>
Tensor<T> concat_channels(const std::vector<const Tensor<T>*>& parts) {
  if (parts.empty()) throw ShapeError("concat of nothing");
  Shape shape = parts.front()->shape();
  const std::size_t rows = parts.front()->size() / shape.back();
  std::size_t total = 0;
  for (const Tensor<T>* p : parts) {
    if (p->rank() != shape.size() || p->size() / p->shape().back() != rows) {
      throw ShapeError("concat parts disagree outside the channel axis");
    }
    total += p->shape().back();
  }
  shape.back() = total;
  Tensor<T> y(shape);
  for (std::size_t r = 0; r < rows; ++r) {
    T* dst = y.raw() + r * total;
    for (const Tensor<T>* p : parts) {
      const std::size_t c = p->shape().back();
      std::copy_n(p->raw() + r * c, c, dst);
      dst += c;
    }
  }
  return y;
}

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& grad, const std::vector<std::size_t>& channels) {
  const std::size_t total = grad.shape().back();
  const std::size_t rows = grad.size() / total;
  std::size_t sum = 0;
  for (std::size_t c : channels) sum += c;
  if (sum != total) throw ShapeError("split_channels: channel counts do not add up");
  std::vector<Tensor<T>> out;
  std::size_t offset = 0;
  for (std::size_t c : channels) {
    Shape s = grad.shape();
    s.back() = c;
    Tensor<T> part(s);
    for (std::size_t r = 0; r < rows; ++r) std::copy_n(grad.raw() + r * total + offset, c, part.raw() + r * c);
    out.push_back(std::move(part));
    offset += c;
  }
  return out;
}

#define LOWFAKE_INSTANTIATE_OPS(T)                                                                   \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,           \
                                    std::size_t);                                                    \
  template Conv2dGrads<T> conv2d_backward(const Tensor<T>&, const Tensor<T>&, std::size_t,          \
                                          const Tensor<T>&, bool);                                   \
  template Tensor<T> dense_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template DenseGrads<T> dense_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, bool); \
  template Tensor<T> batchnorm_train(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,          \
                                     BatchNormCache<T>&, double);                                    \
  template Tensor<T> batchnorm_eval(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,           \
                                    const Tensor<T>&, const Tensor<T>&, double);                     \
  template BatchNormGrads<T> batchnorm_backward(const BatchNormCache<T>&, const Tensor<T>&,         \
                                                const Tensor<T>&);                                   \
  template void batchnorm_update_running(const BatchNormCache<T>&, Tensor<T>&, Tensor<T>&, double); \
  template Tensor<T> maxpool_forward(const Tensor<T>&, std::size_t, std::vector<std::uint32_t>&);   \
  template Tensor<T> maxpool_backward(const Shape&, const std::vector<std::uint32_t>&,              \
                                      const Tensor<T>&);                                             \
  template Tensor<T> activation_forward(ActivationKind, const Tensor<T>&);                          \
  template Tensor<T> activation_backward(ActivationKind, const Tensor<T>&, const Tensor<T>&);       \
  template ActivationWithGrad<T> activation_forward_with_grad(ActivationKind, const Tensor<T>&);     \
  template Tensor<T> sigmoid_forward(const Tensor<T>&);                                             \
  template Tensor<T> sigmoid_backward(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> softmax_forward(const Tensor<T>&);                                             \
  template Tensor<T> softmax_backward(const Tensor<T>&, const Tensor<T>&);                          \
  template Tensor<T> multiply(const Tensor<T>&, const Tensor<T>&);                                  \
  template Tensor<T> concat_channels(const std::vector<const Tensor<T>*>&);                          \
  template std::vector<Tensor<T>> split_channels(const Tensor<T>&, const std::vector<std::size_t>&);

LOWFAKE_INSTANTIATE_OPS(float)
LOWFAKE_INSTANTIATE_OPS(double)

}  // namespace lowfake::nn
