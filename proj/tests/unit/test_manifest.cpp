#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "heartsiam/manifest.hpp"

using namespace heartsiam;

namespace {

std::filesystem::path write_manifest_text(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "hs_manifest_tests";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream f(p, std::ios::trunc);
  f << text;
  return p;
}

}  // namespace

TEST_CASE("two-row manifest counts one record per class") {
  const auto p = write_manifest_text("two.csv",
                                     "record_id,path,domain,label\n"
                                     "a0001,a0001.wav,a,-1\n"
                                     "a0002,a0002.wav,a,1\n");
  const DatasetIndex index = load_manifest(p.string());
  REQUIRE(index.records.size() == 2);
  REQUIRE(index.count('a', Label::Normal) == 1);
  REQUIRE(index.count('a', Label::Abnormal) == 1);
  REQUIRE(index.records[0].label == Label::Normal);
  REQUIRE(index.records[1].label == Label::Abnormal);

  std::size_t total = 0;
  for (const auto& [cell, n] : index.counts) total += n;
  REQUIRE(total == index.records.size());
}

TEST_CASE("empty manifest after header gives an empty index") {
  const auto p = write_manifest_text("empty.csv", "record_id,path,domain,label\n");
  const DatasetIndex index = load_manifest(p.string());
  REQUIRE(index.records.empty());
  REQUIRE(index.counts.empty());
}

TEST_CASE("label outside {-1,1} is rejected with the line number") {
  const auto p = write_manifest_text("badlabel.csv",
                                     "record_id,path,domain,label\n"
                                     "a0001,a0001.wav,a,-1\n"
                                     "a0002,a0002.wav,a,2\n");
  REQUIRE_THROWS_WITH(load_manifest(p.string()), Catch::Matchers::ContainsSubstring("line 3"));
}

TEST_CASE("unknown domain letter is rejected") {
  const auto p = write_manifest_text("baddomain.csv",
                                     "record_id,path,domain,label\n"
                                     "x0001,x0001.wav,x,-1\n");
  REQUIRE_THROWS_WITH(load_manifest(p.string()), Catch::Matchers::ContainsSubstring("domain"));
}

TEST_CASE("malformed row with wrong column count is rejected") {
  const auto p = write_manifest_text("badcols.csv",
                                     "record_id,path,domain,label\n"
                                     "a0001,a0001.wav,a\n");
  REQUIRE_THROWS_WITH(load_manifest(p.string()), Catch::Matchers::ContainsSubstring("4 columns"));
}

TEST_CASE("bad header is rejected") {
  const auto p = write_manifest_text("badheader.csv", "id,path,domain,label\n");
  REQUIRE_THROWS_AS(load_manifest(p.string()), DataError);
}

TEST_CASE("paths resolve relative to the manifest directory") {
  const auto p = write_manifest_text("rel.csv",
                                     "record_id,path,domain,label\n"
                                     "b0001,sub/b0001.wav,b,1\n");
  const DatasetIndex index = load_manifest(p.string());
  const auto expected = p.parent_path() / "sub" / "b0001.wav";
  REQUIRE(index.records[0].path == expected.string());
}

TEST_CASE("manifest round-trips through write_manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "hs_manifest_tests";
  std::filesystem::create_directories(dir);
  std::vector<RecordDescriptor> recs = {
      {"a0001", (dir / "a0001.wav").string(), 'a', Label::Normal},
      {"b0002", (dir / "b0002.wav").string(), 'b', Label::Abnormal},
  };
  const auto p = dir / "rt.csv";
  write_manifest(p.string(), recs);
  const DatasetIndex index = load_manifest(p.string());
  REQUIRE(index.records.size() == 2);
  REQUIRE(index.records[0].record_id == "a0001");
  REQUIRE(index.records[0].domain == 'a');
  REQUIRE(index.records[1].label == Label::Abnormal);
  REQUIRE(index.records[1].path == (dir / "b0002.wav").string());
}
