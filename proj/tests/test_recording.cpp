#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "skna/recording.hpp"
#include "test_helpers.hpp"

using namespace skna;

namespace {

Recording small_recording() {
  Recording rec;
  rec.participant_id = "P01";
  rec.rate = 1000.0;
  rec.channel_names = {"ch1", "ch2"};
  rec.channels = {{0.0, 0.5, -0.25, 1e-7, 2.0}, {1.0, 2.0, 3.0, 4.0, 5.0}};
  return rec;
}

}  // namespace

TEST_CASE("recording CSV round-trips bit-exactly", "[recording]") {
  testutil::TempDir dir("reccsv");
  const auto path = dir / "P01.csv";
  const Recording rec = small_recording();
  save_recording_csv(path, rec);
  const Recording back = load_recording_csv(path);
  CHECK(back.participant_id == "P01");
  CHECK(back.rate == rec.rate);
  CHECK(back.channel_names == rec.channel_names);
  REQUIRE(back.channels.size() == 2);
  CHECK(back.channels[0] == rec.channels[0]);
  CHECK(back.channels[1] == rec.channels[1]);

  save_recording_csv(dir / "again.csv", back);
  CHECK(testutil::slurp(dir / "again.csv") == testutil::slurp(path));
}

TEST_CASE("recording binary round-trips bit-exactly", "[recording]") {
  testutil::TempDir dir("recbin");
  const auto path = dir / "P01.skr";
  const Recording rec = small_recording();
  save_recording_binary(path, rec);
  const Recording back = load_recording_binary(path);
  CHECK(back.rate == rec.rate);
  CHECK(back.channel_names == rec.channel_names);
  CHECK(back.channels == rec.channels);
  CHECK(load_recording(path).channels == rec.channels);  // dispatch by extension
}

TEST_CASE("binary recording without its sidecar is rejected", "[recording]") {
  testutil::TempDir dir("recmeta");
  const auto path = dir / "P01.skr";
  save_recording_binary(path, small_recording());
  std::filesystem::remove(dir / "P01.skr.meta");
  CHECK_THROWS_AS(load_recording_binary(path), FormatError);
}

TEST_CASE("non-finite sample reports its 0-based row index", "[recording]") {
  testutil::TempDir dir("recnan");
  const auto path = dir / "bad.csv";
  std::string text = "rate=1000;channels=ch1\n";
  for (int i = 0; i < 5; ++i) text += "0.125\n";
  text += "nan\n0.5\n";
  write_file_atomic(path, text);
  try {
    load_recording_csv(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.index() == 5);
  }
}

TEST_CASE("ragged and unparsable rows are data errors with row index", "[recording]") {
  testutil::TempDir dir("recbad");
  write_file_atomic(dir / "ragged.csv", "rate=1000;channels=a,b\n1,2\n3\n");
  try {
    load_recording_csv(dir / "ragged.csv");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.index() == 1);
  }
  write_file_atomic(dir / "text.csv", "rate=1000;channels=a\n1\noops\n");
  CHECK_THROWS_AS(load_recording_csv(dir / "text.csv"), DataError);
}

TEST_CASE("malformed headers and empty recordings are format errors", "[recording]") {
  testutil::TempDir dir("rechdr");
  write_file_atomic(dir / "h1.csv", "rate=1000\n1\n");
  CHECK_THROWS_AS(load_recording_csv(dir / "h1.csv"), FormatError);
  write_file_atomic(dir / "h2.csv", "rate=0;channels=a\n1\n");
  CHECK_THROWS_AS(load_recording_csv(dir / "h2.csv"), FormatError);
  write_file_atomic(dir / "h3.csv", "rate=1000;channels=a\n");
  CHECK_THROWS_AS(load_recording_csv(dir / "h3.csv"), FormatError);

  Recording empty_channels = small_recording();
  empty_channels.channels = {{}, {}};
  CHECK_THROWS_AS(validate_recording(empty_channels), FormatError);

  Recording mismatched = small_recording();
  mismatched.channels.pop_back();
  CHECK_THROWS_AS(validate_recording(mismatched), FormatError);

  Recording ragged = small_recording();
  ragged.channels[1].pop_back();
  CHECK_THROWS_AS(validate_recording(ragged), DataError);
}

TEST_CASE("annotations round-trip sorted by onset", "[recording]") {
  testutil::TempDir dir("ann");
  std::vector<SegmentAnnotation> anns;
  anns.push_back({TaskLabel::TG, 394.0, 10.0, 6.0});
  anns.push_back({TaskLabel::VM, 36.0, 30.0, std::nullopt});
  const auto path = dir / "p.ann.csv";
  save_annotations(path, anns);
  auto back = load_annotations(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].label == TaskLabel::VM);  // stable-sorted by start
  CHECK(back[0].start_s == 36.0);
  CHECK_FALSE(back[0].vas.has_value());
  CHECK(back[1].label == TaskLabel::TG);
  REQUIRE(back[1].vas.has_value());
  CHECK(*back[1].vas == 6.0);
}

TEST_CASE("TG annotation without a VAS score is a format error", "[recording]") {
  testutil::TempDir dir("annvas");
  write_file_atomic(dir / "a.csv", "label,start_s,duration_s,vas\nTG,10,10,\n");
  CHECK_THROWS_AS(load_annotations(dir / "a.csv"), FormatError);
  write_file_atomic(dir / "b.csv", "label,start_s,duration_s,vas\nVM,10,30,5\n");
  CHECK_THROWS_AS(load_annotations(dir / "b.csv"), FormatError);  // VAS on a non-TG row
  write_file_atomic(dir / "c.csv", "label,start_s,duration_s,vas\nXX,10,30,\n");
  CHECK_THROWS_AS(load_annotations(dir / "c.csv"), FormatError);
  write_file_atomic(dir / "d.csv", "label,start_s,duration_s,vas\nTG,10,-1,5\n");
  CHECK_THROWS_AS(load_annotations(dir / "d.csv"), FormatError);
  write_file_atomic(dir / "e.csv", "label,start_s,duration_s\nVM,10,30\n");
  CHECK_THROWS_AS(load_annotations(dir / "e.csv"), FormatError);  // bad header
}

TEST_CASE("task labels and default durations", "[recording]") {
  CHECK(task_label_from("VM") == TaskLabel::VM);
  CHECK(task_label_from("ST") == TaskLabel::ST);
  CHECK(task_label_from("TG") == TaskLabel::TG);
  CHECK_THROWS_AS(task_label_from("vm"), FormatError);
  CHECK(default_duration_s(TaskLabel::VM) == 30.0);
  CHECK(default_duration_s(TaskLabel::ST) == 120.0);
  CHECK(default_duration_s(TaskLabel::TG) == 10.0);
}
