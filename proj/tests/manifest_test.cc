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

#include <gtest/gtest.h>

#include <fstream>

#include "singshift/audio.h"
#include "singshift/error.h"
#include "singshift/toy_corpus.h"
#include "support/test_util.h"

namespace singshift {
namespace {

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::filesystem::create_directories(dir_ / "wav");
    SaveWav(Silence(0.5, 24000), dir_ / "wav" / "a.wav");
    SaveWav(Silence(1.25, 24000), dir_ / "wav" / "b.wav");
    std::ofstream(dir_ / "wav" / "a.feat") << "x";
  }
  testing::TempDir dir_;
};

TEST_F(ManifestTest, ParsesRelativePathsCommentsAndDurations) {
  const CorpusManifest m = ParseManifest(
      "# wav\tfeatures\tspeaker\tsplit\n"
      "wav/a.wav\twav/a.feat\talice\ttrain\n"
      "\n"
      "wav/b.wav\t-\tbob\ttest\t2.5\r\n"
      "wav/b.wav\t-\talice\ttrain\n",
      dir_.path());
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.entries[0].wav, dir_.path() / "wav/a.wav");
  EXPECT_EQ(m.entries[0].features, dir_.path() / "wav/a.feat");
  EXPECT_TRUE(m.entries[1].features.empty());
  EXPECT_EQ(m.entries[1].duration_s, 2.5);
  EXPECT_EQ(m.Speakers(), std::vector<std::string>({"alice", "bob"}));
  const auto d = m.SpeakerDurations();
  EXPECT_NEAR(d.at("alice"), 1.75, 1e-9);
  EXPECT_NEAR(d.at("bob"), 2.5, 1e-9);
  EXPECT_EQ(m.Split("test").size(), 1u);
  EXPECT_EQ(m.Split("train").size(), 2u);
}

TEST_F(ManifestTest, RejectsBadLinesAndMissingFiles) {
  auto code = [&](const std::string& text) {
    try {
      ParseManifest(text, dir_.path());
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kState;
  };
  EXPECT_EQ(code("wav/a.wav\t-\talice\n"), ErrorCode::kFormat);
  EXPECT_EQ(code("wav/a.wav\t-\t\ttrain\n"), ErrorCode::kFormat);
  EXPECT_EQ(code("wav/a.wav\t-\talice\ttrain\tlong\n"), ErrorCode::kFormat);
  EXPECT_EQ(code("wav/zz.wav\t-\talice\ttrain\n"), ErrorCode::kIo);
  EXPECT_EQ(code("wav/a.wav\twav/zz.feat\talice\ttrain\n"), ErrorCode::kIo);
}

TEST_F(ManifestTest, WriteReadRoundTrip) {
  CorpusManifest m;
  m.entries.push_back({dir_ / "wav" / "a.wav", dir_ / "wav" / "a.feat", "alice", "train", 0.5});
  m.entries.push_back({dir_ / "wav" / "b.wav", {}, "bob", "test", 0.0});
  WriteManifest(m, dir_ / "m.tsv");
  const CorpusManifest r = ReadManifest(dir_ / "m.tsv");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(std::filesystem::weakly_canonical(r.entries[0].wav),
            std::filesystem::weakly_canonical(m.entries[0].wav));
  EXPECT_EQ(r.entries[0].speaker, "alice");
  EXPECT_TRUE(r.entries[1].features.empty());
  EXPECT_EQ(r.entries[1].split, "test");
  EXPECT_NEAR(r.SpeakerDurations().at("bob"), 1.25, 1e-9);
  EXPECT_THROW(ReadManifest(dir_ / "none.tsv"), Error);
}

}  // namespace
}  // namespace singshift
