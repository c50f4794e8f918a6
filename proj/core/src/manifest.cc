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

#include "singshift/manifest.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "singshift/audio.h"
#include "singshift/error.h"

namespace singshift {

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::filesystem::path Resolve(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::map<std::string, double> CorpusManifest::SpeakerDurations() const {
  std::map<std::string, double> out;
  for (const auto& e : entries) {
    out[e.speaker] += e.duration_s > 0.0 ? e.duration_s : WavDuration(e.wav);
  }
  return out;
}

std::vector<std::string> CorpusManifest::Speakers() const {
  std::set<std::string> ids;
  for (const auto& e : entries) ids.insert(e.speaker);
  return {ids.begin(), ids.end()};
}

CorpusManifest CorpusManifest::Split(const std::string& split) const {
  CorpusManifest out;
  for (const auto& e : entries) {
    if (e.split == split) out.entries.push_back(e);
  }
  return out;
}

CorpusManifest ParseManifest(const std::string& text, const std::filesystem::path& base_dir) {
  CorpusManifest m;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = SplitTabs(line);
    if (cols.size() < 4 || cols.size() > 5) {
      throw Error(ErrorCode::kFormat,
                  "manifest line " + std::to_string(lineno) + ": expected 4 or 5 columns");
    }
    ManifestEntry e;
    e.wav = Resolve(cols[0], base_dir);
    if (cols[1] != "-" && !cols[1].empty()) e.features = Resolve(cols[1], base_dir);
    e.speaker = cols[2];
    e.split = cols[3];
    if (e.speaker.empty()) {
      throw Error(ErrorCode::kFormat, "manifest line " + std::to_string(lineno) + ": empty speaker");
    }
    if (cols.size() == 5) {
      try {
        e.duration_s = std::stod(cols[4]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kFormat,
                    "manifest line " + std::to_string(lineno) + ": bad duration");
      }
    }
    if (!std::filesystem::exists(e.wav)) {
      throw Error(ErrorCode::kIo, "manifest references missing file " + e.wav.string());
    }
    if (!e.features.empty() && !std::filesystem::exists(e.features)) {
      throw Error(ErrorCode::kIo, "manifest references missing file " + e.features.string());
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

CorpusManifest ReadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ParseManifest(ss.str(), path.parent_path());
}

void WriteManifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIo, "cannot write manifest " + path.string());
  os << "# wav\tfeatures\tspeaker\tsplit\tduration_s\n";
  for (const auto& e : manifest.entries) {
    char dur[32];
    std::snprintf(dur, sizeof(dur), "%.6f", e.duration_s);
    os << e.wav.string() << '\t' << (e.features.empty() ? "-" : e.features.string()) << '\t'
       << e.speaker << '\t' << e.split << '\t' << dur << '\n';
  }
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace singshift
