#pragma once

// Shared state for the separation model. One mixing vector a in C^{IJ} per
// (bin, frame) stacks the columns of the I x J mixing matrix (a[j*I + i] =
// A(i, j)). Sources live in C^J per (bin, frame); components in C^K with a
// fixed block partition onto sources. All per-(f, l) arrays are flat with
// index f * frames + l.

#include <string>
#include <vector>

#include "common.hpp"
#include "nmf.hpp"

namespace vemove {

struct Dims {
  int channels = 0;    // I
  int sources = 0;     // J
  int bins = 0;        // F
  int frames = 0;      // L
  int components = 0;  // K, total over sources

  int at(int f, int l) const { return f * frames + l; }
  int stacked() const { return channels * sources; }
};

struct Observations {
  Dims dims;
  std::vector<Vec> x;  // per (f, l): I-vector

  static Observations from_spectrograms(const std::vector<Mat>& channels);
};

struct Parameters {
  NmfModel nmf;                    // W: F x K, H: K x L
  std::vector<Vec> prior_mean;     // per f: IJ, chain start mean
  std::vector<Mat> evolution_cov;  // per f: IJ x IJ, random-walk step covariance
  RVec noise_var;                  // per f
};

struct Posteriors {
  Dims dims;

  // mixing chain, per (f, l)
  std::vector<Vec> a_mean;          // IJ
  std::vector<Mat> a_cov;           // IJ x IJ
  std::vector<double> a_logdet;     // log|a_cov| at update time
  std::vector<Mat> u;               // J x J: E[A^H A] under the current chain posterior

  // per f, from the pairwise joints of consecutive frames
  std::vector<Mat> pair_moment;        // 2IJ x 2IJ accumulated second moment (+ jitter I)
  std::vector<double> pair_logdet;     // sum over l of log|pairwise cov|, exact

  // sources, per (f, l)
  std::vector<Vec> s_mean;         // J
  std::vector<Mat> s_cov;          // J x J
  std::vector<Mat> s_qmom;         // cov + mean mean^H
  std::vector<double> s_logdet;    // log|s_cov| at update time

  // components, per (f, l); posterior kept as diagonal stats
  std::vector<Vec> c_mean;         // K
  std::vector<RVec> c_var;         // K
  std::vector<RVec> c_qmom;        // var + |mean|^2
  std::vector<double> c_logdet;    // log|full K x K posterior cov| at update time

  void allocate(const Dims& d);
};

}  // namespace vemove
