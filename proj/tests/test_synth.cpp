#include <gtest/gtest.h>

#include "glakepos/hashing.hpp"
#include "glakepos/synth.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace glakepos;
using testing_support::TempDir;

namespace {

void expect_recovered(const SynthManifest& m, const std::filesystem::path& dir) {
  for (const auto& img : m.images) {
    const auto mask = load_mask(dir / (img.image_id + m.spec.extension));
    const auto lakes = label_components(mask);
    ASSERT_EQ(lakes.size(), img.lakes.size()) << img.image_id;
    for (std::size_t i = 0; i < lakes.size(); ++i) {
      EXPECT_EQ(lakes[i].bbox, img.lakes[i].bbox) << img.image_id;
      EXPECT_EQ(lakes[i].area, img.lakes[i].area) << img.image_id;
    }
  }
}

}  // namespace

TEST(Synth, SinglePlantedBlock) {
  TempDir dir("syn");
  CorpusSpec spec;
  spec.count = 1;
  spec.width = spec.height = 64;
  spec.blob_min = spec.blob_max = 8;
  spec.seed = 7;
  const auto m = generate_corpus(spec, dir.path());
  ASSERT_EQ(m.images.size(), 1u);
  ASSERT_EQ(m.images[0].lakes.size(), 1u);
  EXPECT_EQ(m.images[0].lakes[0].bbox.w, 8u);
  EXPECT_EQ(m.images[0].lakes[0].area, 64u);
  expect_recovered(m, dir.path());
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
}

TEST(Synth, ThreeLakesPerImage) {
  TempDir dir("syn");
  CorpusSpec spec;
  spec.count = 30;
  spec.width = spec.height = 48;
  spec.lakes_min = spec.lakes_max = 3;
  spec.blob_min = 2;
  spec.blob_max = 12;
  spec.seed = 3;
  const auto m = generate_corpus(spec, dir.path(), 4);
  for (const auto& img : m.images) EXPECT_EQ(img.lakes.size(), 3u);
  expect_recovered(m, dir.path());
}

TEST(Synth, IrregularBlobsAreRecoveredUnderEightConnectivity) {
  TempDir dir("syn");
  CorpusSpec spec;
  spec.count = 40;
  spec.width = 80;
  spec.height = 60;
  spec.lakes_min = 1;
  spec.lakes_max = 6;
  spec.blob_min = 3;
  spec.blob_max = 15;
  spec.seed = 11;
  spec.irregular = true;
  spec.extension = ".pgm";
  const auto m = generate_corpus(spec, dir.path(), 2);
  expect_recovered(m, dir.path());
  // Polyominoes are four-connected, so the stricter rule finds the same blobs.
  for (const auto& img : m.images) {
    const auto mask = load_mask(dir / (img.image_id + ".pgm"));
    AnalysisConfig four;
    four.connectivity = Connectivity::four;
    EXPECT_EQ(label_components(mask, four).size(), img.lakes.size());
  }
}

TEST(Synth, DeterministicFiles) {
  TempDir a("syn"), b("syn");
  CorpusSpec spec;
  spec.count = 10;
  spec.lakes_max = 4;
  spec.blob_min = 2;
  spec.seed = 99;
  generate_corpus(spec, a.path(), 1);
  generate_corpus(spec, b.path(), 8);
  for (const auto& f : std::filesystem::directory_iterator(a.path())) {
    EXPECT_EQ(file_sha256(f.path()), file_sha256(b / f.path().filename().string())) << f.path();
  }
}

TEST(Synth, InfeasibleSpecFails) {
  TempDir dir("syn");
  CorpusSpec spec;
  spec.width = spec.height = 10;
  spec.lakes_min = spec.lakes_max = 20;
  spec.blob_min = spec.blob_max = 4;
  EXPECT_THROW(generate_corpus(spec, dir.path()), ValidationError);
  spec.lakes_min = 3;
  spec.lakes_max = 2;
  EXPECT_THROW(validate(spec), ValidationError);
  spec.lakes_min = 1;
  spec.blob_max = 11;
  EXPECT_THROW(validate(spec), ValidationError);
}
