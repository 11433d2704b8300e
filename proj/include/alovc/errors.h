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

#ifndef ALOVC_ERRORS_H_
#define ALOVC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace alovc {

// Error classes double as the CLI exit-code taxonomy.
enum class ErrorClass {
  kUsage = 1,
  kInputFormat = 2,
  kBundle = 3,
  kProfile = 4,
  kIo = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

// Bad command line or configuration.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorClass::kUsage, what) {}
};

// Audio that cannot be consumed: wrong WAV format, too short, non-finite.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what)
      : Error(ErrorClass::kInputFormat, what) {}
};

class BundleError : public Error {
 public:
  enum class Kind {
    kFormat,       // bad magic, unparsable header, manifest layout
    kShape,        // tensor shape disagrees with the declared layer widths
    kTruncated,    // payload shorter than the manifest
    kConsistency,  // declared parameter count != manifest sum
    kTopology,     // model missing or wired differently than expected
  };
  BundleError(Kind kind, const std::string& what)
      : Error(ErrorClass::kBundle, what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Target-profile problems: pitch statistics, speaker embeddings.
class ProfileError : public Error {
 public:
  enum class Reason {
    kNoVoicedSpeech,
    kTooFewVoicedFrames,
    kDegenerateSource,
    kEmbeddingParse,
    kZeroEmbedding,
    kTooShort,
    kMismatch,
  };
  ProfileError(Reason reason, const std::string& what)
      : Error(ErrorClass::kProfile, what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorClass::kIo, what) {}
};

}  // namespace alovc

#endif  // ALOVC_ERRORS_H_
