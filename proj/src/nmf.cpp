#include "nmf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace vemove {

int NmfModel::num_sources() const {
  return source_of.empty() ? 0 : source_of.back() + 1;
}

void NmfModel::validate() const {
  if (w.cols() != h.rows()) {
    throw std::invalid_argument("NmfModel: w has " + std::to_string(w.cols()) +
                                " components but h has " + std::to_string(h.rows()));
  }
  if (static_cast<int>(source_of.size()) != w.cols()) {
    throw std::invalid_argument("NmfModel: source_of must have one entry per component");
  }
  int prev = 0;
  for (size_t k = 0; k < source_of.size(); ++k) {
    if (source_of[k] < prev || source_of[k] > prev + 1 || (k == 0 && source_of[k] != 0)) {
      throw std::invalid_argument("NmfModel: source_of must be nondecreasing blocks from 0");
    }
    prev = source_of[k];
  }
  if ((w.array() < 0).any() || (h.array() < 0).any()) {
    throw std::invalid_argument("NmfModel: w and h must be nonnegative");
  }
}

std::vector<RMat> source_power(const NmfModel& model) {
  model.validate();
  const int sources = model.num_sources();
  std::vector<RMat> out(sources, RMat::Zero(model.w.rows(), model.h.cols()));
  for (int k = 0; k < model.components(); ++k) {
    out[model.source_of[k]].noalias() += model.w.col(k) * model.h.row(k);
  }
  return out;
}

double kl_divergence(const RMat& v, const RMat& wh) {
  if (v.rows() != wh.rows() || v.cols() != wh.cols()) {
    throw std::invalid_argument("kl_divergence: shape mismatch");
  }
  double acc = 0.0;
  for (int c = 0; c < v.cols(); ++c) {
    for (int r = 0; r < v.rows(); ++r) {
      const double a = v(r, c);
      const double b = wh(r, c);
      if (a > 0) {
        acc += a * std::log(a / b) - a + b;
      } else {
        acc += b;
      }
    }
  }
  return acc;
}

std::pair<RMat, RMat> kl_nmf_fit(const RMat& v, int components, int iterations,
                                 uint64_t seed, double floor) {
  if ((v.array() < 0).any()) throw std::invalid_argument("kl_nmf_fit: negative input");
  if (components < 1) throw std::invalid_argument("kl_nmf_fit: components must be >= 1");
  const int f = static_cast<int>(v.rows());
  const int l = static_cast<int>(v.cols());

  Rng rng(seed);
  RMat w(f, components), h(components, l);
  const double scale = std::sqrt(std::max(v.mean(), floor) / components);
  for (int c = 0; c < components; ++c) {
    for (int r = 0; r < f; ++r) w(r, c) = scale * (0.1 + rng.uniform());
  }
  for (int r = 0; r < components; ++r) {
    for (int c = 0; c < l; ++c) h(r, c) = scale * (0.1 + rng.uniform());
  }

  RMat wh = w * h;
  RMat ratio(f, l);
  for (int it = 0; it < iterations; ++it) {
    ratio = v.array() / wh.array().max(floor);
    h = (h.array() * (w.transpose() * ratio).array() /
         (w.colwise().sum().transpose().replicate(1, l)).array().max(floor))
            .max(floor)
            .matrix();
    wh.noalias() = w * h;

    ratio = v.array() / wh.array().max(floor);
    w = (w.array() * (ratio * h.transpose()).array() /
         (h.rowwise().sum().transpose().replicate(f, 1)).array().max(floor))
            .max(floor)
            .matrix();
    wh.noalias() = w * h;
  }
  return {w, h};
}

NmfModel concat_models(const std::vector<std::pair<RMat, RMat>>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_models: no parts");
  const int f = static_cast<int>(parts[0].first.rows());
  const int l = static_cast<int>(parts[0].second.cols());
  int total = 0;
  for (const auto& p : parts) {
    if (p.first.rows() != f || p.second.cols() != l) {
      throw std::invalid_argument("concat_models: shapes differ between parts");
    }
    if (p.first.cols() != p.second.rows()) {
      throw std::invalid_argument("concat_models: w/h component counts differ");
    }
    total += static_cast<int>(p.first.cols());
  }
  NmfModel model;
  model.w.resize(f, total);
  model.h.resize(total, l);
  model.source_of.resize(total);
  int at = 0;
  for (size_t j = 0; j < parts.size(); ++j) {
    const int k = static_cast<int>(parts[j].first.cols());
    model.w.middleCols(at, k) = parts[j].first;
    model.h.middleRows(at, k) = parts[j].second;
    for (int q = 0; q < k; ++q) model.source_of[at + q] = static_cast<int>(j);
    at += k;
  }
  model.validate();
  return model;
}

void rescale(NmfModel& model) {
  for (int k = 0; k < model.components(); ++k) {
    const double norm = model.w.col(k).sum();
    if (norm <= 0) continue;
    model.w.col(k) /= norm;
    model.h.row(k) *= norm;
  }
}

}  // namespace vemove
