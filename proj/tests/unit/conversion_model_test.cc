// Copyright 2026 The alovc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "alovc/conversion_model.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "alovc/errors.h"
#include "alovc/model_config.h"
#include "alovc/nn/layers.h"
#include "batch_reference.h"

namespace alovc {
namespace {

using testing::batch_model;
using testing::random_sequence;
using testing::Seq;

// --- positional encoding ------------------------------------------------------

TEST(PositionalEncoding, FirstCall) {
  PositionalEncoder pe(8);
  const auto v = pe.step();
  EXPECT_NEAR(v[0], 0.84147, 1e-5);
  EXPECT_NEAR(v[1], 0.54030, 1e-5);
  EXPECT_EQ(v[0], std::sin(1.0));
  EXPECT_EQ(v[1], std::cos(1.0));
  EXPECT_EQ(pe.frames_encoded(), 1u);
}

TEST(PositionalEncoding, TenthCallWithDimensionFour) {
  PositionalEncoder pe(4);
  std::vector<double> v;
  for (int i = 0; i < 10; ++i) v = pe.step();
  EXPECT_NEAR(v[2], 0.09983, 1e-5);
  EXPECT_NEAR(v[2], std::sin(0.1), 1e-15);
}

TEST(PositionalEncoding, StreamingEqualsClosedFormTable) {
  for (int d : {2, 16, 128}) {
    PositionalEncoder pe(d);
    for (std::size_t pos = 1; pos <= 1000; ++pos) {
      const auto v = pe.step();
      for (int i = 0; i < d / 2; ++i) {
        const double angle = static_cast<double>(pos) / std::pow(10000.0, 2.0 * i / d);
        ASSERT_EQ(v[2 * i], std::sin(angle)) << d << " " << pos << " " << i;
        ASSERT_EQ(v[2 * i + 1], std::cos(angle)) << d << " " << pos << " " << i;
      }
    }
  }
}

TEST(PositionalEncoding, PairsLieOnUnitCircle) {
  PositionalEncoder pe(128);
  for (int pos = 1; pos <= 1000; ++pos) {
    const auto v = pe.step();
    for (int i = 0; i < 64; ++i) {
      ASSERT_NEAR(v[2 * i] * v[2 * i] + v[2 * i + 1] * v[2 * i + 1], 1.0, 1e-12);
    }
  }
}

TEST(PositionalEncoding, ResetRestartsAtOneAndRejectsOddDims) {
  PositionalEncoder pe(6);
  const auto first = pe.step();
  pe.step();
  pe.reset();
  EXPECT_EQ(pe.step(), first);
  EXPECT_THROW(PositionalEncoder(5), std::invalid_argument);
  EXPECT_THROW(PositionalEncoder(0), std::invalid_argument);
  EXPECT_THROW(positional_encoding(1, 3), std::invalid_argument);
}

// --- conversion network ----------------------------------------------------------

std::vector<double> unit_embedding(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(d);
  double n = 0.0;
  for (double& x : v) {
    x = g(rng);
    n += x * x;
  }
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

struct Inputs {
  Seq ppg;
  std::vector<PitchFeatures> pitch;
};

Inputs random_inputs(int ppg_dim, std::size_t frames, std::uint64_t seed) {
  Inputs in;
  in.ppg = random_sequence(frames, ppg_dim, seed);
  std::mt19937_64 rng(seed + 1);
  std::bernoulli_distribution v(0.6);
  std::uniform_real_distribution<double> f(90.0, 300.0), c(0.0, 1.0);
  std::uniform_real_distribution<float> var(-1.0f, 1.0f);
  for (std::size_t t = 0; t < frames; ++t) {
    PitchFeatures p;
    p.vuf = v(rng) ? 1 : 0;
    p.f0 = p.vuf ? f(rng) : 0.0;
    p.correlation = c(rng);
    p.variance = {var(rng), var(rng)};
    in.pitch.push_back(p);
  }
  return in;
}

std::vector<VocoderFrame> run(const ConversionModel& m, std::span<const double> spk,
                              const Inputs& in) {
  auto st = m.make_state(spk);
  std::vector<VocoderFrame> out;
  for (std::size_t t = 0; t < in.ppg.size(); ++t) out.push_back(m.step(st, in.ppg[t], in.pitch[t]));
  return out;
}

TEST(ConversionModel, ZeroBundleGivesZeroBsccAndConstantHeads) {
  const nn::Bundle b = make_bundle(ModelConfig::toy());
  const ConversionModel strict(b, VufMode::kStrict);
  const ConversionModel predicted(b, VufMode::kPredicted);
  const auto spk = unit_embedding(strict.speaker_dim(), 1);
  const Inputs in = random_inputs(strict.ppg_dim(), 20, 2);
  const auto a = run(strict, spk, in);
  const auto c = run(predicted, spk, in);
  for (std::size_t t = 0; t < 20; ++t) {
    for (double v : a[t].bscc) EXPECT_EQ(v, 0.0);
    // Zero residual: strict mode keeps the incoming F0 exactly.
    EXPECT_DOUBLE_EQ(a[t].f0, in.pitch[t].f0);
    // Constant VUF head at 0.5: never above threshold.
    EXPECT_EQ(c[t].f0, 0.0);
    EXPECT_EQ(c[t].correlation, 0.5);
  }
}

TEST(ConversionModel, StreamingMatchesBatch) {
  const nn::Bundle b = make_random_bundle(ModelConfig::toy(), 3);
  const ConversionModel m(b);
  const auto spk = unit_embedding(m.speaker_dim(), 4);
  const Inputs in = random_inputs(m.ppg_dim(), 80, 5);
  const auto out = run(m, spk, in);

  // Batch: assemble the full input sequence, run each block over it.
  Seq x;
  for (std::size_t t = 0; t < in.ppg.size(); ++t) {
    std::vector<float> row = in.ppg[t];
    for (double v : positional_encoding(t + 1, m.pe_dim())) row.push_back(static_cast<float>(v));
    for (double v : spk) row.push_back(static_cast<float>(v));
    row.push_back(in.pitch[t].vuf ? 1.0f : 0.0f);
    row.push_back(in.pitch[t].variance[0]);
    row.push_back(in.pitch[t].variance[1]);
    x.push_back(row);
  }
  const auto& spec = b.model("conversion");
  const Seq h = batch_model(spec, b, x, 0, 3);
  const Seq bscc = batch_model(spec, b, h, 3, 4);
  const Seq f0 = batch_model(spec, b, h, 4, 5);
  const Seq post = batch_model(spec, b, bscc, 6, 9);
  double worst = 0.0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    for (int k = 0; k < 18; ++k) {
      worst = std::max(worst, std::abs(out[t].bscc[k] - (bscc[t][k] + post[t][k])));
    }
    if (in.pitch[t].vuf) {
      const double expected = std::clamp(in.pitch[t].f0 * std::exp(static_cast<double>(f0[t][0])), 40.0, 500.0);
      EXPECT_NEAR(out[t].f0, expected, 1e-5 * expected) << t;
    }
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(ConversionModel, SpeakerEmbeddingChangesOutput) {
  const nn::Bundle b = make_random_bundle(ModelConfig::toy(), 6);
  const ConversionModel m(b);
  const Inputs in = random_inputs(m.ppg_dim(), 30, 7);
  const auto a = run(m, unit_embedding(m.speaker_dim(), 8), in);
  const auto c = run(m, unit_embedding(m.speaker_dim(), 9), in);
  bool differ = false;
  for (std::size_t t = 0; t < a.size(); ++t) differ |= a[t].bscc != c[t].bscc;
  EXPECT_TRUE(differ);
}

TEST(ConversionModel, ZeroPostnetPassesHeadBsccExactly) {
  nn::Bundle b = make_random_bundle(ModelConfig::toy(), 10);
  nn::zero_tensors(b, "conversion/postnet");
  const ConversionModel m(b);
  const auto spk = unit_embedding(m.speaker_dim(), 11);
  const Inputs in = random_inputs(m.ppg_dim(), 25, 12);
  const auto out = run(m, spk, in);

  const auto& spec = b.model("conversion");
  const nn::Sequential trunk(spec, b, 0, 3), head(spec, b, 3, 4);
  auto ts = trunk.make_state();
  auto hs = head.make_state();
  PositionalEncoder pe(m.pe_dim());
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::vector<float> row = in.ppg[t];
    for (double v : pe.step()) row.push_back(static_cast<float>(v));
    for (double v : spk) row.push_back(static_cast<float>(v));
    row.push_back(in.pitch[t].vuf ? 1.0f : 0.0f);
    row.push_back(in.pitch[t].variance[0]);
    row.push_back(in.pitch[t].variance[1]);
    const auto bscc = *head.step(hs, *trunk.step(ts, row));
    for (int k = 0; k < 18; ++k) ASSERT_EQ(out[t].bscc[k], static_cast<double>(bscc[k])) << t;
  }
}

TEST(ConversionModel, StrictModePassesVufAndCorrelation) {
  const ConversionModel m(make_random_bundle(ModelConfig::toy(), 13), VufMode::kStrict);
  const Inputs in = random_inputs(m.ppg_dim(), 200, 14);
  const auto out = run(m, unit_embedding(m.speaker_dim(), 15), in);
  for (std::size_t t = 0; t < out.size(); ++t) {
    EXPECT_EQ(out[t].f0 > 0.0, in.pitch[t].vuf == 1) << t;
    EXPECT_EQ(out[t].correlation, in.pitch[t].correlation);
    if (out[t].f0 > 0.0) {
      EXPECT_GE(out[t].f0, 40.0);
      EXPECT_LE(out[t].f0, 500.0);
    }
  }
}

TEST(ConversionModel, PredictedModeUsesVufHead) {
  const ConversionModel m(make_random_bundle(ModelConfig::toy(), 16), VufMode::kPredicted);
  const Inputs in = random_inputs(m.ppg_dim(), 100, 17);
  for (const auto& f : run(m, unit_embedding(m.speaker_dim(), 18), in)) {
    EXPECT_GE(f.correlation, 0.0);
    EXPECT_LE(f.correlation, 1.0);
    EXPECT_EQ(f.f0 > 0.0, f.correlation > 0.5);
  }
}

TEST(ConversionModel, PerturbingALaterFrameLeavesEarlierOutputs) {
  const ConversionModel m(make_random_bundle(ModelConfig::toy(), 19));
  const auto spk = unit_embedding(m.speaker_dim(), 20);
  Inputs in = random_inputs(m.ppg_dim(), 40, 21);
  const auto a = run(m, spk, in);
  in.ppg[25][0] += 1.0f;
  in.pitch[25].variance[1] += 0.5f;
  const auto c = run(m, spk, in);
  for (std::size_t t = 0; t < 25; ++t) {
    EXPECT_EQ(a[t].bscc, c[t].bscc) << t;
    EXPECT_EQ(a[t].f0, c[t].f0) << t;
  }
  EXPECT_NE(a[25].bscc, c[25].bscc);
  EXPECT_EQ(m.lookahead(), 0);
}

TEST(ConversionModel, Errors) {
  const nn::Bundle b = make_random_bundle(ModelConfig::toy(), 22);
  const ConversionModel m(b);
  try {
    m.make_state(std::vector<double>(m.speaker_dim() + 1, 0.1));
    FAIL();
  } catch (const ProfileError& e) {
    EXPECT_EQ(e.reason(), ProfileError::Reason::kMismatch);
  }
  auto st = m.make_state(unit_embedding(m.speaker_dim(), 23));
  EXPECT_THROW(m.step(st, std::vector<float>(m.ppg_dim() + 1, 0.0f), {}), std::invalid_argument);

  nn::Bundle no_conv;
  no_conv.add_model(acoustic_spec(AcousticConfig{}));
  EXPECT_THROW(ConversionModel c(no_conv), BundleError);

  auto spec = conversion_spec(ConversionConfig{});
  spec.layers[6].lookahead = 1;
  nn::Bundle ahead;
  ahead.add_model(spec);
  EXPECT_THROW(ConversionModel c(ahead), BundleError);

  auto wrong = conversion_spec(ConversionConfig{});
  wrong.meta["speaker_dim"] = "31";
  nn::Bundle mis;
  mis.add_model(wrong);
  EXPECT_THROW(ConversionModel c(mis), BundleError);
}

}  // namespace
}  // namespace alovc
