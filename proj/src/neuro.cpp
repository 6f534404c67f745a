#include "ugglan/neuro.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ugglan/kernels.hpp"

namespace ugglan::neuro {

namespace {

using json = nlohmann::json;

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.99;

struct DenseRef {
  std::size_t w = 0;  // offset of weights (in x out, row-major)
  std::size_t b = 0;  // offset of bias (out)
  std::size_t in = 0, out = 0;
};

struct Layout {
  std::vector<std::size_t> proj;  // weight offsets per projection
  std::vector<DenseRef> hidden;
  std::vector<std::size_t> gamma, beta;      // per hidden layer (batch norm)
  std::vector<std::size_t> run_mean, run_var;  // offsets into running stats
  DenseRef out;
  std::size_t param_total = 0;
  std::size_t run_total = 0;
};

Layout make_layout(const NetConfig& cfg) {
  Layout lt;
  std::size_t off = 0;
  for (const ProjectionSpec& p : cfg.projections) {
    lt.proj.push_back(off);
    off += p.input_dim * p.output_dim;
  }
  std::size_t in = cfg.concat_dim();
  std::size_t run = 0;
  for (std::size_t units : cfg.hidden) {
    DenseRef d;
    d.in = in;
    d.out = units;
    d.w = off;
    off += in * units;
    d.b = off;
    off += units;
    lt.hidden.push_back(d);
    if (cfg.batch_norm) {
      lt.gamma.push_back(off);
      off += units;
      lt.beta.push_back(off);
      off += units;
      lt.run_mean.push_back(run);
      run += units;
      lt.run_var.push_back(run);
      run += units;
    }
    in = units;
  }
  lt.out.in = in;
  lt.out.out = cfg.outputs;
  lt.out.w = off;
  off += in * cfg.outputs;
  lt.out.b = off;
  off += cfg.outputs;
  lt.param_total = off;
  lt.run_total = run;
  return lt;
}

struct Workspace {
  Matrix h0;
  std::vector<Matrix> z;     // pre-normalization
  std::vector<Matrix> xhat;  // normalized (batch norm only)
  std::vector<Matrix> y;     // pre-activation
  std::vector<Matrix> a;     // post-activation, post-dropout
  std::vector<std::vector<double>> mu, var;
  std::vector<std::vector<unsigned char>> mask;
  Matrix logits;
  Matrix probs;
};

void add_bias_rows(Matrix& m, const double* bias) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    kern::axpy(1.0, bias, m.row(i), m.cols);
  }
}

void forward_pass(const NetConfig& cfg, const Layout& lt,
                  const std::vector<double>& params, std::vector<double>* running,
                  std::span<const Example* const> batch, bool train_mode,
                  double dropout, std::uint64_t dropout_seed, bool update_running,
                  Workspace& ws) {
  const std::size_t B = batch.size();
  const std::size_t d0 = cfg.concat_dim();
  const std::size_t total_slots = cfg.total_slots();

  ws.h0 = Matrix(B, d0);
  for (std::size_t r = 0; r < B; ++r) {
    const Example& ex = *batch[r];
    if (ex.size() != total_slots) {
      throw std::invalid_argument("neuro: example slot count mismatch");
    }
    double* h = ws.h0.row(r);
    std::size_t slot = 0;
    std::size_t col = 0;
    for (std::size_t p = 0; p < cfg.projections.size(); ++p) {
      const ProjectionSpec& spec = cfg.projections[p];
      const double* w = params.data() + lt.proj[p];
      for (std::size_t s = 0; s < spec.slots; ++s, ++slot) {
        const fofe::SparseVec& sv = ex[slot];
        if (sv.dim != static_cast<int>(spec.input_dim)) {
          throw std::invalid_argument("neuro: sparse dim mismatch");
        }
        for (const auto& [idx, weight] : sv.items) {
          kern::axpy(weight, w + static_cast<std::size_t>(idx) * spec.output_dim,
                     h + col, spec.output_dim);
        }
        col += spec.output_dim;
      }
    }
  }

  const std::size_t L = cfg.hidden.size();
  ws.z.assign(L, {});
  ws.xhat.assign(L, {});
  ws.y.assign(L, {});
  ws.a.assign(L, {});
  ws.mu.assign(L, {});
  ws.var.assign(L, {});
  ws.mask.assign(L, {});

  std::mt19937_64 drop_rng(dropout_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Matrix* prev = &ws.h0;
  for (std::size_t l = 0; l < L; ++l) {
    const DenseRef& d = lt.hidden[l];
    Matrix& z = ws.z[l];
    z = Matrix(B, d.out);
    kern::matmul(prev->v.data(), params.data() + d.w, z.v.data(), B, d.in, d.out);
    add_bias_rows(z, params.data() + d.b);

    Matrix& y = ws.y[l];
    if (cfg.batch_norm) {
      const double* gamma = params.data() + lt.gamma[l];
      const double* beta = params.data() + lt.beta[l];
      Matrix& xhat = ws.xhat[l];
      xhat = Matrix(B, d.out);
      y = Matrix(B, d.out);
      if (train_mode) {
        ws.mu[l].assign(d.out, 0.0);
        ws.var[l].assign(d.out, 0.0);
        for (std::size_t i = 0; i < B; ++i) {
          for (std::size_t j = 0; j < d.out; ++j) ws.mu[l][j] += z.at(i, j);
        }
        for (double& m : ws.mu[l]) m /= static_cast<double>(B);
        for (std::size_t i = 0; i < B; ++i) {
          for (std::size_t j = 0; j < d.out; ++j) {
            double c = z.at(i, j) - ws.mu[l][j];
            ws.var[l][j] += c * c;
          }
        }
        for (double& v : ws.var[l]) v /= static_cast<double>(B);
        for (std::size_t i = 0; i < B; ++i) {
          for (std::size_t j = 0; j < d.out; ++j) {
            double inv = 1.0 / std::sqrt(ws.var[l][j] + kBnEps);
            double xh = (z.at(i, j) - ws.mu[l][j]) * inv;
            xhat.at(i, j) = xh;
            y.at(i, j) = gamma[j] * xh + beta[j];
          }
        }
        if (update_running && running) {
          double* rm = running->data() + lt.run_mean[l];
          double* rv = running->data() + lt.run_var[l];
          for (std::size_t j = 0; j < d.out; ++j) {
            rm[j] = kBnMomentum * rm[j] + (1.0 - kBnMomentum) * ws.mu[l][j];
            rv[j] = kBnMomentum * rv[j] + (1.0 - kBnMomentum) * ws.var[l][j];
          }
        }
      } else {
        const double* rm = running->data() + lt.run_mean[l];
        const double* rv = running->data() + lt.run_var[l];
        for (std::size_t i = 0; i < B; ++i) {
          for (std::size_t j = 0; j < d.out; ++j) {
            double inv = 1.0 / std::sqrt(rv[j] + kBnEps);
            double xh = (z.at(i, j) - rm[j]) * inv;
            xhat.at(i, j) = xh;
            y.at(i, j) = gamma[j] * xh + beta[j];
          }
        }
      }
    } else {
      y = z;
    }

    Matrix& a = ws.a[l];
    a = Matrix(B, d.out);
    for (std::size_t i = 0; i < B; ++i) {
      for (std::size_t j = 0; j < d.out; ++j) {
        double v = y.at(i, j);
        a.at(i, j) = v > 0.0 ? v : cfg.leak * v;
      }
    }

    if (train_mode && dropout > 0.0) {
      ws.mask[l].assign(B * d.out, 1);
      double keep = 1.0 - dropout;
      for (std::size_t i = 0; i < B * d.out; ++i) {
        if (unit(drop_rng) < dropout) {
          ws.mask[l][i] = 0;
          a.v[i] = 0.0;
        } else {
          a.v[i] /= keep;
        }
      }
    }
    prev = &a;
  }

  ws.logits = Matrix(B, cfg.outputs);
  kern::matmul(prev->v.data(), params.data() + lt.out.w, ws.logits.v.data(), B,
               lt.out.in, cfg.outputs);
  add_bias_rows(ws.logits, params.data() + lt.out.b);

  ws.probs = Matrix(B, cfg.outputs);
  if (cfg.outputs == 1) {
    for (std::size_t i = 0; i < B; ++i) {
      ws.probs.at(i, 0) = 1.0 / (1.0 + std::exp(-ws.logits.at(i, 0)));
    }
  } else {
    for (std::size_t i = 0; i < B; ++i) {
      double mx = ws.logits.at(i, 0);
      for (std::size_t j = 1; j < cfg.outputs; ++j) {
        mx = std::max(mx, ws.logits.at(i, j));
      }
      double sum = 0.0;
      for (std::size_t j = 0; j < cfg.outputs; ++j) {
        double e = std::exp(ws.logits.at(i, j) - mx);
        ws.probs.at(i, j) = e;
        sum += e;
      }
      for (std::size_t j = 0; j < cfg.outputs; ++j) ws.probs.at(i, j) /= sum;
    }
  }
}

double mean_loss(const NetConfig& cfg, const Workspace& ws,
                 std::span<const int> labels) {
  const std::size_t B = ws.probs.rows;
  double total = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    if (cfg.outputs == 1) {
      double p = std::clamp(ws.probs.at(i, 0), 1e-12, 1.0 - 1e-12);
      total += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    } else {
      double p = std::clamp(ws.probs.at(i, static_cast<std::size_t>(labels[i])),
                            1e-12, 1.0);
      total += -std::log(p);
    }
  }
  return total / static_cast<double>(B);
}

}  // namespace

std::size_t NetConfig::concat_dim() const {
  std::size_t d = 0;
  for (const ProjectionSpec& p : projections) d += p.output_dim * p.slots;
  return d;
}

std::size_t NetConfig::total_slots() const {
  std::size_t s = 0;
  for (const ProjectionSpec& p : projections) s += p.slots;
  return s;
}

Net Net::init(const NetConfig& cfg, std::uint64_t seed) {
  Net net;
  net.cfg_ = cfg;
  Layout lt = make_layout(cfg);
  net.params_.assign(lt.param_total, 0.0);
  net.running_.assign(lt.run_total, 0.0);

  std::mt19937_64 rng(seed);
  auto uniform_init = [&](std::size_t off, std::size_t fan_in, std::size_t count) {
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < count; ++i) net.params_[off + i] = dist(rng);
  };

  for (std::size_t p = 0; p < cfg.projections.size(); ++p) {
    const ProjectionSpec& spec = cfg.projections[p];
    uniform_init(lt.proj[p], spec.input_dim, spec.input_dim * spec.output_dim);
  }
  for (std::size_t l = 0; l < lt.hidden.size(); ++l) {
    const DenseRef& d = lt.hidden[l];
    uniform_init(d.w, d.in, d.in * d.out);
    if (cfg.batch_norm) {
      for (std::size_t j = 0; j < d.out; ++j) net.params_[lt.gamma[l] + j] = 1.0;
      net.running_[lt.run_mean[l]] = 0.0;
      for (std::size_t j = 0; j < d.out; ++j) net.running_[lt.run_var[l] + j] = 1.0;
    }
  }
  uniform_init(lt.out.w, lt.out.in, lt.out.in * lt.out.out);
  return net;
}

std::size_t Net::projection_offset(std::size_t index) const {
  Layout lt = make_layout(cfg_);
  return lt.proj.at(index);
}

Matrix Net::predict(std::span<const Example* const> batch) const {
  Workspace ws;
  Layout lt = make_layout(cfg_);
  std::vector<double> running = running_;
  forward_pass(cfg_, lt, params_, &running, batch, /*train_mode=*/false, 0.0, 0,
               /*update_running=*/false, ws);
  return ws.probs;
}

double Net::loss(std::span<const Example* const> batch, std::span<const int> labels,
                 bool train_mode, double dropout, std::uint64_t dropout_seed) {
  Workspace ws;
  Layout lt = make_layout(cfg_);
  forward_pass(cfg_, lt, params_, &running_, batch, train_mode, dropout,
               dropout_seed, /*update_running=*/false, ws);
  return mean_loss(cfg_, ws, labels);
}

double Net::loss_and_grad(std::span<const Example* const> batch,
                          std::span<const int> labels, double dropout,
                          std::uint64_t dropout_seed, std::vector<double>& grad,
                          bool update_running) {
  const std::size_t B = batch.size();
  if (B == 0 || labels.size() != B) {
    throw std::invalid_argument("neuro: empty batch or label size mismatch");
  }
  Layout lt = make_layout(cfg_);
  Workspace ws;
  forward_pass(cfg_, lt, params_, &running_, batch, /*train_mode=*/true, dropout,
               dropout_seed, update_running, ws);
  double loss = mean_loss(cfg_, ws, labels);

  grad.assign(params_.size(), 0.0);
  const double invB = 1.0 / static_cast<double>(B);

  // Head gradient.
  Matrix dlogits(B, cfg_.outputs);
  for (std::size_t i = 0; i < B; ++i) {
    if (cfg_.outputs == 1) {
      dlogits.at(i, 0) = (ws.probs.at(i, 0) - static_cast<double>(labels[i])) * invB;
    } else {
      for (std::size_t j = 0; j < cfg_.outputs; ++j) {
        double delta = j == static_cast<std::size_t>(labels[i]) ? 1.0 : 0.0;
        dlogits.at(i, j) = (ws.probs.at(i, j) - delta) * invB;
      }
    }
  }

  const std::size_t L = cfg_.hidden.size();
  const Matrix& last_a = L > 0 ? ws.a[L - 1] : ws.h0;
  kern::matmul_tn(last_a.v.data(), dlogits.v.data(), grad.data() + lt.out.w, B,
                  lt.out.in, cfg_.outputs);
  for (std::size_t i = 0; i < B; ++i) {
    kern::axpy(1.0, dlogits.row(i), grad.data() + lt.out.b, cfg_.outputs);
  }

  Matrix da(B, lt.out.in);
  kern::matmul_nt(dlogits.v.data(), params_.data() + lt.out.w, da.v.data(), B,
                  cfg_.outputs, lt.out.in);

  for (std::size_t l = L; l-- > 0;) {
    const DenseRef& d = lt.hidden[l];

    if (!ws.mask[l].empty()) {
      double keep = 1.0 - dropout;
      for (std::size_t i = 0; i < B * d.out; ++i) {
        da.v[i] = ws.mask[l][i] ? da.v[i] / keep : 0.0;
      }
    }

    // Leaky-ReLU uses the pre-activation sign.
    Matrix dy(B, d.out);
    for (std::size_t i = 0; i < B * d.out; ++i) {
      dy.v[i] = ws.y[l].v[i] > 0.0 ? da.v[i] : cfg_.leak * da.v[i];
    }

    Matrix dz(B, d.out);
    if (cfg_.batch_norm) {
      const double* gamma = params_.data() + lt.gamma[l];
      double* dgamma = grad.data() + lt.gamma[l];
      double* dbeta = grad.data() + lt.beta[l];
      for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t j = 0; j < d.out; ++j) {
          dgamma[j] += dy.at(i, j) * ws.xhat[l].at(i, j);
          dbeta[j] += dy.at(i, j);
        }
      }
      // Standard train-mode batch-norm backward over batch statistics.
      std::vector<double> sum_dxhat(d.out, 0.0), sum_dxhat_xhat(d.out, 0.0);
      for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t j = 0; j < d.out; ++j) {
          double dxhat = dy.at(i, j) * gamma[j];
          sum_dxhat[j] += dxhat;
          sum_dxhat_xhat[j] += dxhat * ws.xhat[l].at(i, j);
        }
      }
      for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t j = 0; j < d.out; ++j) {
          double inv = 1.0 / std::sqrt(ws.var[l][j] + kBnEps);
          double dxhat = dy.at(i, j) * gamma[j];
          dz.at(i, j) = inv / static_cast<double>(B) *
                        (static_cast<double>(B) * dxhat - sum_dxhat[j] -
                         ws.xhat[l].at(i, j) * sum_dxhat_xhat[j]);
        }
      }
    } else {
      dz = dy;
    }

    const Matrix& input = l > 0 ? ws.a[l - 1] : ws.h0;
    kern::matmul_tn(input.v.data(), dz.v.data(), grad.data() + d.w, B, d.in, d.out);
    for (std::size_t i = 0; i < B; ++i) {
      kern::axpy(1.0, dz.row(i), grad.data() + d.b, d.out);
    }
    Matrix next_da(B, d.in);
    kern::matmul_nt(dz.v.data(), params_.data() + d.w, next_da.v.data(), B, d.out,
                    d.in);
    da = std::move(next_da);
  }

  // Projection gradients from the sparse inputs.
  for (std::size_t r = 0; r < B; ++r) {
    const Example& ex = *batch[r];
    const double* dh = da.row(r);
    std::size_t slot = 0;
    std::size_t col = 0;
    for (std::size_t p = 0; p < cfg_.projections.size(); ++p) {
      const ProjectionSpec& spec = cfg_.projections[p];
      double* gw = grad.data() + lt.proj[p];
      for (std::size_t s = 0; s < spec.slots; ++s, ++slot) {
        for (const auto& [idx, weight] : ex[slot].items) {
          kern::axpy(weight, dh + col,
                     gw + static_cast<std::size_t>(idx) * spec.output_dim,
                     spec.output_dim);
        }
        col += spec.output_dim;
      }
    }
  }

  return loss;
}

double lr_at(const TrainConfig& cfg, std::size_t epoch) {
  if (cfg.epochs <= 1) return cfg.lr_end;
  double t = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
  return cfg.lr_start + (cfg.lr_end - cfg.lr_start) * t;
}

double dropout_at(const TrainConfig& cfg, std::size_t epoch) {
  if (cfg.epochs <= 1) return cfg.dropout_end;
  double t = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
  return cfg.dropout_start + (cfg.dropout_end - cfg.dropout_start) * t;
}

std::vector<double> train(Net& net, const TrainConfig& cfg, const Sampler& sampler) {
  std::vector<double> trace;
  std::mt19937_64 rng(cfg.seed);

  const AdamConfig& adam = net.adam();
  std::vector<double> m(net.param_count(), 0.0);
  std::vector<double> v(net.param_count(), 0.0);
  std::vector<double> grad;
  std::size_t t = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochData data = sampler(epoch, rng);
    const std::size_t n = data.xs.size();
    if (n == 0) {
      trace.push_back(0.0);
      continue;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    double lr = lr_at(cfg, epoch);
    double dropout = dropout_at(cfg, epoch);
    double epoch_loss = 0.0;
    std::size_t batches = 0;

    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      std::size_t stop = std::min(n, start + cfg.batch_size);
      std::vector<const Example*> xs;
      std::vector<int> ys;
      xs.reserve(stop - start);
      ys.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        xs.push_back(data.xs[order[i]]);
        ys.push_back(data.ys[order[i]]);
      }
      std::uint64_t drop_seed = rng();
      double loss = net.loss_and_grad(xs, ys, dropout, drop_seed, grad);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("neuro: non-finite loss at epoch " +
                                 std::to_string(epoch));
      }
      epoch_loss += loss;
      ++batches;

      if (cfg.l2 > 0.0) {
        kern::axpy(cfg.l2, net.params().data(), grad.data(), grad.size());
      }

      ++t;
      double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t));
      double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t));
      std::vector<double>& params = net.params();
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * grad[i];
        v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * grad[i] * grad[i];
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + adam.eps);
      }
    }
    trace.push_back(batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Model persistence.

namespace {
constexpr char kNnMagic[6] = {'U', 'G', 'N', 'N', '1', '\n'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t read_u64(std::ifstream& in) {
  char b[8];
  in.read(b, 8);
  if (!in) throw std::runtime_error("model file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}
}  // namespace

void save_model(const Net& net, const std::string& path, const std::string& extra_json) {
  const NetConfig& cfg = net.config();
  json meta;
  meta["projections"] = json::array();
  for (const ProjectionSpec& p : cfg.projections) {
    meta["projections"].push_back({{"input_dim", p.input_dim},
                                   {"output_dim", p.output_dim},
                                   {"slots", p.slots}});
  }
  meta["hidden"] = cfg.hidden;
  meta["outputs"] = cfg.outputs;
  meta["leak"] = cfg.leak;
  meta["batch_norm"] = cfg.batch_norm;
  meta["adam"] = {{"beta1", net.adam().beta1},
                  {"beta2", net.adam().beta2},
                  {"eps", net.adam().eps}};
  std::string meta_text = meta.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write(kNnMagic, sizeof(kNnMagic));
  write_u64(out, meta_text.size());
  out.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
  write_u64(out, extra_json.size());
  out.write(extra_json.data(), static_cast<std::streamsize>(extra_json.size()));
  write_u64(out, net.params().size());
  out.write(reinterpret_cast<const char*>(net.params().data()),
            static_cast<std::streamsize>(net.params().size() * sizeof(double)));
  write_u64(out, net.running_stats().size());
  out.write(reinterpret_cast<const char*>(net.running_stats().data()),
            static_cast<std::streamsize>(net.running_stats().size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

Net load_model(const std::string& path, std::string* extra_json) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  char magic[sizeof(kNnMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kNnMagic, sizeof(kNnMagic)) != 0) {
    throw std::runtime_error("not a UGNN1 file: " + path);
  }

  auto read_blob = [&](std::string& dst) {
    std::uint64_t n = read_u64(in);
    dst.resize(n);
    in.read(dst.data(), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("model file truncated");
  };
  std::string meta_text, extra;
  read_blob(meta_text);
  read_blob(extra);
  if (extra_json) *extra_json = extra;

  json meta = json::parse(meta_text);
  NetConfig cfg;
  for (const auto& p : meta.at("projections")) {
    cfg.projections.push_back({p.at("input_dim").get<std::size_t>(),
                               p.at("output_dim").get<std::size_t>(),
                               p.at("slots").get<std::size_t>()});
  }
  cfg.hidden = meta.at("hidden").get<std::vector<std::size_t>>();
  cfg.outputs = meta.at("outputs").get<std::size_t>();
  cfg.leak = meta.at("leak").get<double>();
  cfg.batch_norm = meta.at("batch_norm").get<bool>();

  Net net = Net::init(cfg, 0);
  net.adam().beta1 = meta["adam"]["beta1"].get<double>();
  net.adam().beta2 = meta["adam"]["beta2"].get<double>();
  net.adam().eps = meta["adam"]["eps"].get<double>();

  std::uint64_t np = read_u64(in);
  if (np != net.params().size()) {
    throw std::runtime_error("model parameter count mismatch");
  }
  in.read(reinterpret_cast<char*>(net.params().data()),
          static_cast<std::streamsize>(np * sizeof(double)));
  std::uint64_t nr = read_u64(in);
  if (nr != net.running_stats().size()) {
    throw std::runtime_error("model running-stat count mismatch");
  }
  in.read(reinterpret_cast<char*>(net.running_stats().data()),
          static_cast<std::streamsize>(nr * sizeof(double)));
  if (!in) throw std::runtime_error("model file truncated");
  return net;
}

// ---------------------------------------------------------------------------
// Embeddings.

std::size_t EmbeddingTable::lookup(const std::string& word) const {
  auto it = index.find(word);
  if (it != index.end()) return it->second;
  std::string lower = word;
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return word == lower ? unk_lower_row : unk_row;
}

EmbeddingTable load_embeddings(const std::string& path, std::size_t max_words) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);

  std::vector<std::string> words;
  std::vector<std::vector<double>> rows;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (words.size() < max_words && std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    std::vector<double> vec;
    double x;
    while (ls >> x) vec.push_back(x);
    if (word.empty() || vec.empty() || (dim != 0 && vec.size() != dim)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed embedding line");
    }
    dim = vec.size();
    words.push_back(word);
    rows.push_back(std::move(vec));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty embedding file");

  EmbeddingTable table;
  table.words = words;
  table.weights = Matrix(words.size() + 2, dim);
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      table.weights.at(i, j) = rows[i][j];
      mean[j] += rows[i][j];
    }
    table.index[words[i]] = i;
  }
  for (double& x : mean) x /= static_cast<double>(rows.size());
  table.unk_row = words.size();
  table.unk_lower_row = words.size() + 1;
  for (std::size_t j = 0; j < dim; ++j) {
    table.weights.at(table.unk_row, j) = mean[j];
    table.weights.at(table.unk_lower_row, j) = mean[j];
  }
  return table;
}

}  // namespace ugglan::neuro
