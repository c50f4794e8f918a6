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

#ifndef SINGSHIFT_MANIFEST_H_
#define SINGSHIFT_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace singshift {

struct ManifestEntry {
  std::filesystem::path wav;
  std::filesystem::path features;  // empty when content is derived on the fly
  std::string speaker;
  std::string split = "train";
  double duration_s = 0.0;  // 0 means read from the wav header
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  // Total seconds per speaker. Entries without a stored duration are
  // measured from their wav header.
  std::map<std::string, double> SpeakerDurations() const;
  std::vector<std::string> Speakers() const;  // sorted, unique
  CorpusManifest Split(const std::string& split) const;
  std::size_t size() const { return entries.size(); }
};

// Tab-separated lines: wav path, feature path ("-" for none), speaker,
// split, and an optional duration in seconds. Lines starting with '#' are
// comments. Relative paths resolve against the manifest's directory.
// Reading checks that every referenced file exists (kIo).
CorpusManifest ReadManifest(const std::filesystem::path& path);
CorpusManifest ParseManifest(const std::string& text, const std::filesystem::path& base_dir);
void WriteManifest(const CorpusManifest& manifest, const std::filesystem::path& path);

}  // namespace singshift

#endif  // SINGSHIFT_MANIFEST_H_
