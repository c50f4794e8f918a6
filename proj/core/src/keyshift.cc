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

#include "singshift/keyshift.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "singshift/error.h"

namespace singshift {

const char* SourceKindName(SourceKind kind) {
  return kind == SourceKind::kSinging ? "singing" : "speech";
}

SourceKind ParseSourceKind(const std::string& name) {
  if (name == "singing") return SourceKind::kSinging;
  if (name == "speech") return SourceKind::kSpeech;
  throw Error(ErrorCode::kArgument, "unknown source kind '" + name + "'");
}

ShiftMode ParseShiftMode(const std::string& name) {
  if (name == "linear") return ShiftMode::kLinear;
  if (name == "semitone") return ShiftMode::kSemitone;
  throw Error(ErrorCode::kArgument, "unknown shift mode '" + name + "'");
}

PitchProfile BuildProfileFromContours(const std::vector<F0Contour>& contours,
                                      const std::string& speaker_id,
                                      SourceKind kind) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : contours) {
    for (std::size_t i = 0; i < c.frames(); ++i) {
      if (c.voiced[i]) {
        sum += c.f0_hz[i];
        ++n;
      }
    }
  }
  if (n == 0) {
    throw Error(ErrorCode::kProfile, "no voiced frames for speaker " + speaker_id);
  }
  return {speaker_id, sum / static_cast<double>(n), n, kind};
}

PitchProfile BuildProfile(const std::vector<Waveform>& utterances,
                          const std::string& speaker_id, SourceKind kind,
                          const PitchConfig& pitch, int hop) {
  if (utterances.empty()) {
    throw Error(ErrorCode::kProfile, "no utterances for speaker " + speaker_id);
  }
  std::vector<F0Contour> contours;
  contours.reserve(utterances.size());
  for (const auto& w : utterances) contours.push_back(EstimateF0(w, pitch, hop));
  return BuildProfileFromContours(contours, speaker_id, kind);
}

namespace {

template <typename Fn>
ShiftResult ApplyShift(const F0Contour& source, double floor_hz, Fn shifted) {
  ShiftResult r;
  r.contour = source;
  for (std::size_t i = 0; i < source.frames(); ++i) {
    if (!source.voiced[i]) continue;
    double v = shifted(source.f0_hz[i]);
    if (v <= 0.0) {
      v = floor_hz;
      ++r.clamped;
    }
    r.contour.f0_hz[i] = v;
  }
  return r;
}

}  // namespace

ShiftResult ShiftF0(const F0Contour& source, double source_mean,
                    double target_mean, double floor_hz, ShiftMode mode) {
  if (!(source_mean > 0.0) || !(target_mean > 0.0)) {
    throw Error(ErrorCode::kArgument, "pitch means must be positive");
  }
  const double delta = target_mean - source_mean;
  ShiftResult r;
  if (mode == ShiftMode::kLinear) {
    r = ApplyShift(source, floor_hz, [delta](double f) { return f + delta; });
  } else {
    const double ratio = target_mean / source_mean;
    r = ApplyShift(source, floor_hz, [ratio](double f) { return f * ratio; });
  }
  r.delta_hz = delta;
  return r;
}

ShiftResult ShiftF0ByDelta(const F0Contour& source, double delta_hz,
                           double floor_hz) {
  ShiftResult r =
      ApplyShift(source, floor_hz, [delta_hz](double f) { return f + delta_hz; });
  r.delta_hz = delta_hz;
  return r;
}

PitchProfile ResolveTargetProfile(const std::string& target,
                                  const ProfileRegistry& registry,
                                  const std::map<std::string, std::string>& fallback) {
  if (auto it = registry.find(target);
      it != registry.end() && it->second.source_kind == SourceKind::kSinging) {
    return it->second;
  }
  if (auto fb = fallback.find(target); fb != fallback.end()) {
    if (auto it = registry.find(fb->second);
        it != registry.end() && it->second.source_kind == SourceKind::kSinging) {
      return it->second;
    }
    throw Error(ErrorCode::kResolution, "fallback singer '" + fb->second +
                                            "' for '" + target +
                                            "' has no singing profile");
  }
  throw Error(ErrorCode::kResolution,
              "no singing profile and no fallback for '" + target + "'");
}

void WriteProfiles(const std::vector<PitchProfile>& profiles,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "speaker_id\tmean_f0_hz\tn_voiced_frames\tsource_kind\n";
  char buf[64];
  for (const auto& p : profiles) {
    std::snprintf(buf, sizeof(buf), "%.17g", p.mean_f0);
    out << p.speaker_id << '\t' << buf << '\t' << p.n_voiced_frames << '\t'
        << SourceKindName(p.source_kind) << '\n';
  }
}

void ReadProfiles(const std::filesystem::path& path, ProfileRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("speaker_id", 0) == 0) continue;
    }
    std::istringstream row(line);
    std::string id, mean, count, kind;
    if (!std::getline(row, id, '\t') || !std::getline(row, mean, '\t') ||
        !std::getline(row, count, '\t') || !std::getline(row, kind, '\t')) {
      throw Error(ErrorCode::kFormat, path.string() + ": bad profile row");
    }
    PitchProfile p;
    p.speaker_id = id;
    try {
      p.mean_f0 = std::stod(mean);
      p.n_voiced_frames = std::stoull(count);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kFormat, path.string() + ": bad profile number");
    }
    p.source_kind = ParseSourceKind(kind);
    registry[id] = p;
  }
}

}  // namespace singshift
