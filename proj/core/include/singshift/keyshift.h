// Copyright (c) 2026 The singshift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SINGSHIFT_KEYSHIFT_H_
#define SINGSHIFT_KEYSHIFT_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "singshift/audio.h"
#include "singshift/config.h"
#include "singshift/pitch.h"

namespace singshift {

enum class SourceKind { kSinging, kSpeech };

const char* SourceKindName(SourceKind kind);
SourceKind ParseSourceKind(const std::string& name);

struct PitchProfile {
  std::string speaker_id;
  double mean_f0 = 0.0;
  std::size_t n_voiced_frames = 0;
  SourceKind source_kind = SourceKind::kSinging;
};

// Frame-weighted mean over every voiced frame of every contour.
// kProfile when no frame is voiced.
PitchProfile BuildProfileFromContours(const std::vector<F0Contour>& contours,
                                      const std::string& speaker_id,
                                      SourceKind kind);

// Runs the pitch tracker on each utterance, then pools the contours.
PitchProfile BuildProfile(const std::vector<Waveform>& utterances,
                          const std::string& speaker_id, SourceKind kind,
                          const PitchConfig& pitch, int hop);

enum class ShiftMode { kLinear, kSemitone };

ShiftMode ParseShiftMode(const std::string& name);

struct ShiftResult {
  F0Contour contour;
  double delta_hz = 0.0;   // target_mean - source_mean
  std::size_t clamped = 0;  // frames whose shifted value was <= 0
};

// Linear mode adds delta = target_mean - source_mean to every voiced frame;
// semitone mode scales by target_mean / source_mean instead. Nonpositive
// results are clamped to `floor_hz`. kArgument unless both means > 0.
ShiftResult ShiftF0(const F0Contour& source, double source_mean,
                    double target_mean, double floor_hz,
                    ShiftMode mode = ShiftMode::kLinear);

// Adds a fixed offset (in Hz) to voiced frames, same clamping rule.
ShiftResult ShiftF0ByDelta(const F0Contour& source, double delta_hz,
                           double floor_hz);

using ProfileRegistry = std::map<std::string, PitchProfile>;

// Singing profile of `target`, else the singing profile of its fallback
// surrogate, else kResolution.
PitchProfile ResolveTargetProfile(const std::string& target,
                                  const ProfileRegistry& registry,
                                  const std::map<std::string, std::string>& fallback);

// Tab-separated: speaker_id, mean_f0_hz, n_voiced_frames, source_kind,
// with a header row. Reading merges rows into `registry`.
void WriteProfiles(const std::vector<PitchProfile>& profiles,
                   const std::filesystem::path& path);
void ReadProfiles(const std::filesystem::path& path, ProfileRegistry& registry);

}  // namespace singshift

#endif  // SINGSHIFT_KEYSHIFT_H_
