#include <doctest.h>

#include <stdexcept>

#include "helpers.hpp"
#include "oracles.hpp"
#include "stft.hpp"

using namespace vemove;
using namespace vemove::testing;

TEST_CASE("analysis matches the direct DFT definition") {
  Rng rng(21);
  const Signal x = random_signal(rng, 1000);
  StftParams p;
  p.window = 64;
  const Spectrogram s = stft_analyze(x, p);
  const Mat want = oracle::naive_stft(x, p.window);
  REQUIRE(s.frames.rows() == want.rows());
  REQUIRE(s.frames.cols() == want.cols());
  CHECK(rel_err(s.frames, want) < 1e-11);
  CHECK(s.window == p.window);
}

TEST_CASE("frame count formula") {
  StftParams p;
  p.window = 64;  // hop 32
  CHECK(stft_num_frames(32, p) == 1);
  CHECK(stft_num_frames(33, p) == 2);
  CHECK(stft_num_frames(64, p) == 2);
  CHECK(stft_num_frames(1000, p) == 32);
}

TEST_CASE("analyze-synthesize is the identity away from the edges") {
  Rng rng(22);
  for (int window : {64, 512}) {
    StftParams p;
    p.window = window;
    const int hop = window / 2;
    const int n = 5000;
    const Signal x = random_signal(rng, n);
    const Signal y = stft_synthesize(stft_analyze(x, p), p, n);
    REQUIRE(y.size() == n);
    const Signal diff = (y - x).segment(hop, n - 2 * hop);
    CHECK(diff.norm() / x.norm() < 1e-9);
  }
}

TEST_CASE("synthesis length control truncates or zero-extends") {
  Rng rng(23);
  StftParams p;
  p.window = 32;
  const Signal x = random_signal(rng, 300);
  const Spectrogram s = stft_analyze(x, p);

  const Signal shorter = stft_synthesize(s, p, 100);
  CHECK(shorter.size() == 100);
  const Signal longer = stft_synthesize(s, p, 1000);
  CHECK(longer.size() == 1000);
  CHECK(longer.tail(300).norm() == doctest::Approx(0.0));
}

TEST_CASE("short inputs still produce complete frames") {
  Rng rng(24);
  StftParams p;
  p.window = 128;
  const Signal x = random_signal(rng, 50);  // shorter than one window
  const Spectrogram s = stft_analyze(x, p);
  CHECK(s.num_frames() == 1);
  CHECK(s.bins() == 65);
  const Signal y = stft_synthesize(s, p, 50);
  CHECK(y.size() == 50);
}

TEST_CASE("window validation") {
  Rng rng(25);
  const Signal x = random_signal(rng, 64);
  StftParams p;
  p.window = 63;
  CHECK_THROWS_AS(stft_analyze(x, p), std::invalid_argument);
  p.window = 2;
  CHECK_THROWS_AS(stft_analyze(x, p), std::invalid_argument);
}
