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

// Target-speaker embeddings. Real encoders run offline and hand over a text
// file (one float per line, optional first line "# tag=<dvector|ecapa|stub>");
// a built-in statistics stub covers tests and demos.

#ifndef ALOVC_SPEAKER_EMBEDDING_H_
#define ALOVC_SPEAKER_EMBEDDING_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alovc/audio_io.h"

namespace alovc {

enum class EmbeddingTag { kDvector, kEcapa, kStub };

std::string_view embedding_tag_name(EmbeddingTag tag);

struct SpeakerEmbedding {
  std::vector<double> values;  // unit L2 norm
  EmbeddingTag tag = EmbeddingTag::kStub;

  std::size_t dim() const { return values.size(); }
};

inline constexpr int kStubEmbeddingDim = 32;

// Scales `v` to unit L2 norm; a vector already unit within 1e-14 is left as
// is. Throws ProfileError(kZeroEmbedding) for a zero vector and
// ProfileError(kEmbeddingParse) for non-finite entries.
void normalize_embedding(std::vector<double>& v);

// Throws ProfileError(kEmbeddingParse / kZeroEmbedding).
SpeakerEmbedding parse_embedding(std::string_view text);
SpeakerEmbedding load_embedding(const std::filesystem::path& path);

// Text form read back bit-exactly by parse_embedding.
std::string format_embedding(const SpeakerEmbedding& e);
void write_embedding(const std::filesystem::path& path, const SpeakerEmbedding& e);

// 32 long-term statistics of `audio`: 18 per-band mean log energies
// (centered across bands), mean MFCC c1..c11, mean and standard deviation of
// voiced log-F0 and the voicing rate; L2-normalized.
// Throws ProfileError(kTooShort) below one second and
// ProfileError(kNoVoicedSpeech) without voiced frames.
SpeakerEmbedding stub_embedding(const Audio& audio);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace alovc

#endif  // ALOVC_SPEAKER_EMBEDDING_H_
