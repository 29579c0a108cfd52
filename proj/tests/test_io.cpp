#include <doctest.h>

#include "medley/midi.hpp"
#include "medley/musicxml.hpp"
#include "medley/playback.hpp"
#include "medley/xml.hpp"
#include "medley/zip.hpp"
#include "support/testgen.hpp"

using namespace medley;

TEST_SUITE_BEGIN("io");

TEST_CASE("xml parser handles attributes, nesting, entities, cdata") {
  auto root = xml::parse(
      "<?xml version=\"1.0\"?><!-- top --><a x=\"1\" y='two &amp; three'>"
      "<b>hi</b><![CDATA[raw <stuff>]]><b z=\"&#65;\"/></a>");
  CHECK(root.name == "a");
  CHECK(root.attribute("x") == "1");
  CHECK(root.attribute("y") == "two & three");
  CHECK(root.children_named("b").size() == 2);
  CHECK(root.child("b")->text == "hi");
  CHECK(root.text == "raw <stuff>");
  CHECK(root.children[1].attribute("z") == "A");
}

TEST_CASE("xml parser reports positions on malformed input") {
  CHECK_THROWS_WITH_AS(xml::parse("<a><b></a>"), doctest::Contains("offset"), MedleyError);
  try {
    xml::parse("<a>");
  } catch (const MedleyError& e) {
    CHECK(e.code() == Errc::XmlSyntax);
  }
}

TEST_CASE("zip round trip with stored entries") {
  auto archive = zip::write_archive({{"hello.txt", "hello"}, {"dir/data.bin", std::string("\x00\x01\x02", 3)}});
  CHECK(zip::looks_like_zip(archive));
  CHECK(zip::entry_names(archive) == std::vector<std::string>{"hello.txt", "dir/data.bin"});
  CHECK(zip::read_entry(archive, "hello.txt") == "hello");
  CHECK(zip::read_entry(archive, "dir/data.bin").size() == 3);
}

TEST_CASE("hand-built SMF fixture: one note, key 60 maps to pitch 61") {
  const unsigned char bytes[] = {
      'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0,
      'M', 'T', 'r', 'k', 0, 0, 0, 13,
      0x00, 0x90, 0x3C, 0x64,        // tick 0: note-on key 60 vel 100
      0x83, 0x60, 0x80, 0x3C, 0x40,  // tick 480: note-off
      0x00, 0xFF, 0x2F, 0x00};
  Song song = parse_midi(std::string_view(reinterpret_cast<const char*>(bytes), sizeof(bytes)));
  CHECK(song.ticks_per_quarter == 480);
  REQUIRE(song.notes.size() == 1);
  CHECK(song.notes[0].pitch == 61);
  CHECK(song.notes[0].onset == 0);
  CHECK(song.notes[0].duration == 480);
  CHECK(song.notes[0].velocity == 100);
  // defaults materialize at tick 0
  REQUIRE(song.tempo_map.size() == 1);
  CHECK(song.tempo_map[0].microseconds_per_quarter == 500000);
  CHECK(song.tempo_map[0].bpm() == doctest::Approx(120.0));
  CHECK(song.time_signatures[0].numerator == 4);
}

TEST_CASE("SMF with zero note events yields an empty song") {
  Song empty;
  empty.ticks_per_quarter = 480;
  empty.tempo_map.push_back({0, 500000});
  empty.time_signatures.push_back({0, 4, 4});
  empty.key_signatures.push_back({0, {}});
  Song parsed = parse_midi(testgen::write_smf(empty));
  CHECK(parsed.notes.empty());
}

TEST_CASE("SMF type 2 is rejected, garbage is rejected") {
  std::string type2("MThd\x00\x00\x00\x06\x00\x02\x00\x01\x01\xE0", 14);
  CHECK_THROWS_AS(parse_midi(type2), MedleyError);
  try {
    parse_midi(type2);
  } catch (const MedleyError& e) {
    CHECK(e.code() == Errc::UnsupportedSmfType);
  }
  CHECK_THROWS_AS(parse_midi("not midi at all"), MedleyError);
}

TEST_CASE("note-on with velocity zero closes the note") {
  Song song;
  song.ticks_per_quarter = 480;
  song.tempo_map.push_back({0, 500000});
  song.time_signatures.push_back({0, 4, 4});
  song.key_signatures.push_back({0, {}});
  NoteEvent n;
  n.pitch = 61;
  n.onset = 0;
  n.duration = 240;
  n.velocity = 90;
  n.track = 1;
  song.notes.push_back(n);
  std::string smf = testgen::write_smf(song);
  // rewrite the note-off (0x81 key vel) into a velocity-0 note-on
  auto pos = smf.find(static_cast<char>(0x80));
  REQUIRE(pos != std::string::npos);
  smf[pos] = static_cast<char>(0x90);
  smf[pos + 2] = 0;
  Song parsed = parse_midi(smf);
  REQUIRE(parsed.notes.size() == 1);
  CHECK(parsed.notes[0].duration == 240);
}

TEST_CASE("dangling note-on closes at track end with a warning") {
  // note-on at tick 0 never released; end-of-track at tick 960
  const unsigned char bytes[] = {
      'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0,
      'M', 'T', 'r', 'k', 0, 0, 0, 9,
      0x00, 0x90, 0x3C, 0x64,
      0x87, 0x40, 0xFF, 0x2F, 0x00};
  Audit audit;
  Song song = parse_midi(std::string_view(reinterpret_cast<const char*>(bytes), sizeof(bytes)),
                         &audit);
  REQUIRE(song.notes.size() == 1);
  CHECK(song.notes[0].duration == 960);
  REQUIRE(audit.size() >= 1);
  CHECK(audit[0].code == "DanglingNoteOn");
}

TEST_CASE("overlapping same-key notes close at the later onset") {
  const unsigned char bytes[] = {
      'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0,
      'M', 'T', 'r', 'k', 0, 0, 0, 18,
      0x00, 0x90, 0x3C, 0x64,        // on at 0
      0x83, 0x60, 0x90, 0x3C, 0x50,  // second on at 480 (same key)
      0x83, 0x60, 0x80, 0x3C, 0x40,  // off at 960
      0x00, 0xFF, 0x2F, 0x00};
  Song song = parse_midi(std::string_view(reinterpret_cast<const char*>(bytes), sizeof(bytes)));
  REQUIRE(song.notes.size() == 2);
  CHECK(song.notes[0].onset == 0);
  CHECK(song.notes[0].duration == 480);
  CHECK(song.notes[1].onset == 480);
  CHECK(song.notes[1].duration == 480);
}

TEST_CASE("SMF round trip is the identity on the song model") {
  testgen::Rng rng(20260810);
  for (int iteration = 0; iteration < 40; ++iteration) {
    testgen::SongOptions options;
    options.tempo_changes = iteration % 2 == 0;
    options.tracks = 1 + iteration % 3;
    Song original = testgen::random_song(rng, options);
    Song parsed = parse_midi(testgen::write_smf(original));
    REQUIRE(parsed.notes.size() == original.notes.size());
    for (size_t i = 0; i < original.notes.size(); ++i) {
      CAPTURE(iteration);
      CAPTURE(i);
      CHECK(parsed.notes[i].pitch == original.notes[i].pitch);
      CHECK(parsed.notes[i].onset == original.notes[i].onset);
      CHECK(parsed.notes[i].duration == original.notes[i].duration);
      CHECK(parsed.notes[i].velocity == original.notes[i].velocity);
      CHECK(parsed.notes[i].track == original.notes[i].track);
    }
    REQUIRE(parsed.tempo_map.size() == original.tempo_map.size());
    for (size_t i = 0; i < original.tempo_map.size(); ++i) {
      CHECK(parsed.tempo_map[i].tick == original.tempo_map[i].tick);
      CHECK(parsed.tempo_map[i].microseconds_per_quarter ==
            original.tempo_map[i].microseconds_per_quarter);
    }
    CHECK(parsed.time_signatures.size() == original.time_signatures.size());
    CHECK(parsed.key_signatures.size() == original.key_signatures.size());
    for (size_t t = 1; t < original.programs.size(); ++t)
      CHECK(parsed.programs[t] == original.programs[t]);
  }
}

TEST_CASE("mxl fixture with annotation on measure 2") {
  ScoreDocument doc;
  doc.measures.resize(2);
  doc.measures[0].index_real = 1;
  doc.measures[1].index_real = 2;
  doc.measures[1].annotations.push_back({"super mario bros", Placement::Above});
  std::string mxl = testgen::write_mxl(doc);

  ScoreDocument parsed = parse_mxl(mxl);
  REQUIRE(parsed.measures.size() == 2);
  REQUIRE(parsed.measures[1].annotations.size() == 1);
  CHECK(parsed.measures[1].annotations[0].text == "super mario bros");
  CHECK(parsed.measures[1].index_real == 2);

  SUBCASE("bare MusicXML parses identically to its zipped form") {
    ScoreDocument bare = parse_mxl(testgen::write_musicxml(doc));
    CHECK(bare.measures.size() == parsed.measures.size());
    CHECK(bare.measures[1].annotations[0].text == parsed.measures[1].annotations[0].text);
  }
}

TEST_CASE("repeat barlines parse into measure flags") {
  ScoreDocument doc;
  doc.measures.resize(4);
  for (int i = 0; i < 4; ++i) doc.measures[i].index_real = i + 1;
  doc.measures[0].repeat_start = true;
  doc.measures[1].repeat_end = 2;
  ScoreDocument parsed = parse_mxl(testgen::write_musicxml(doc));
  CHECK(parsed.measures[0].repeat_start);
  REQUIRE(parsed.measures[1].repeat_end.has_value());
  CHECK(*parsed.measures[1].repeat_end == 2);
  CHECK_FALSE(parsed.measures[2].repeat_start);
}

TEST_CASE("time-wise MusicXML parses like its part-wise equivalent") {
  const char* timewise =
      "<?xml version=\"1.0\"?>\n"
      "<score-timewise version=\"3.1\">\n"
      "  <measure number=\"1\"><part id=\"P1\">\n"
      "    <attributes><divisions>4</divisions>"
      "<time><beats>4</beats><beat-type>4</beat-type></time></attributes>\n"
      "    <note><rest/><duration>16</duration></note>\n"
      "  </part></measure>\n"
      "  <measure number=\"2\"><part id=\"P1\">\n"
      "    <direction><direction-type><words>zelda lullaby</words></direction-type></direction>\n"
      "    <barline location=\"right\"><repeat direction=\"backward\"/></barline>\n"
      "    <note><rest/><duration>16</duration></note>\n"
      "  </part></measure>\n"
      "</score-timewise>\n";
  ScoreDocument doc = parse_mxl(timewise);
  REQUIRE(doc.measures.size() == 2);
  CHECK(doc.parts == std::vector<std::string>{"P1"});
  CHECK(doc.measures[0].time_signature == std::pair<int, int>{4, 4});
  REQUIRE(doc.measures[1].annotations.size() == 1);
  CHECK(doc.measures[1].annotations[0].text == "zelda lullaby");
  REQUIRE(doc.measures[1].repeat_end.has_value());
  CHECK(*doc.measures[1].repeat_end == 2);  // MusicXML default: played twice
}

TEST_CASE("unexpected XML root raises XmlSyntax") {
  try {
    parse_mxl("<opera><aria/></opera>");
    FAIL("expected throw");
  } catch (const MedleyError& e) {
    CHECK(e.code() == Errc::XmlSyntax);
  }
}

TEST_CASE("neither zip nor xml raises NotAZipOrXml") {
  try {
    parse_mxl("BLOB");
    FAIL("expected throw");
  } catch (const MedleyError& e) {
    CHECK(e.code() == Errc::NotAZipOrXml);
  }
}

TEST_CASE("zip without container manifest raises MissingContainerRootfile") {
  auto archive = zip::write_archive({{"something.xml", "<score-partwise/>"}});
  try {
    parse_mxl(archive);
    FAIL("expected throw");
  } catch (const MedleyError& e) {
    CHECK(e.code() == Errc::MissingContainerRootfile);
  }
}

TEST_CASE("expand_repeats identity without repeats") {
  ScoreDocument doc;
  doc.measures.resize(4);
  for (int i = 0; i < 4; ++i) doc.measures[i].index_real = i + 1;
  PlaybackMap map = expand_repeats(doc);
  CHECK(map.order == std::vector<int>{1, 2, 3, 4});
  CHECK(map.first_offset(3) == 3);

  testgen::Rng rng(86);
  for (int iteration = 0; iteration < 50; ++iteration) {
    ScoreDocument plain;
    plain.measures.resize(rng.range(1, 60));
    for (size_t i = 0; i < plain.measures.size(); ++i)
      plain.measures[i].index_real = static_cast<int>(i) + 1;
    PlaybackMap identity = expand_repeats(plain);
    REQUIRE(identity.order.size() == plain.measures.size());
    for (size_t i = 0; i < identity.order.size(); ++i) {
      CHECK(identity.order[i] == static_cast<int>(i) + 1);
      CHECK(identity.first_offset(static_cast<int>(i) + 1) == static_cast<int>(i) + 1);
    }
  }
}

TEST_CASE("expand_repeats duplicates the repeated span") {
  ScoreDocument doc;
  doc.measures.resize(4);
  for (int i = 0; i < 4; ++i) doc.measures[i].index_real = i + 1;
  doc.measures[0].repeat_start = true;
  doc.measures[1].repeat_end = 2;
  PlaybackMap map = expand_repeats(doc);
  CHECK(map.order == std::vector<int>{1, 2, 1, 2, 3, 4});
  CHECK(map.first_offset(3) == 5);
  CHECK(map.real_to_offset.at(1) == std::vector<int>{1, 3});
}

TEST_CASE("numeric repeat counts expand to that many passes") {
  ScoreDocument doc;
  doc.measures.resize(3);
  for (int i = 0; i < 3; ++i) doc.measures[i].index_real = i + 1;
  doc.measures[0].repeat_start = true;
  doc.measures[1].repeat_end = 3;
  PlaybackMap map = expand_repeats(doc);
  CHECK(map.order == std::vector<int>{1, 2, 1, 2, 1, 2, 3});
  CHECK(map.real_to_offset.at(2) == std::vector<int>{2, 4, 6});
  CHECK(map.first_offset(3) == 7);
}

TEST_CASE("notation bar 23 lands on playback bar 27 after an early 4-bar repeat") {
  ScoreDocument doc;
  doc.measures.resize(28);
  for (int i = 0; i < 28; ++i) doc.measures[i].index_real = i + 1;
  doc.measures[4].repeat_start = true;  // bars 5..8 played twice
  doc.measures[7].repeat_end = 2;
  PlaybackMap map = expand_repeats(doc);
  CHECK(map.order.size() == 32);
  CHECK(map.first_offset(23) == 27);
}

TEST_CASE("expand_repeats matches a direct span expansion on random structures") {
  testgen::Rng rng(777111);
  for (int iteration = 0; iteration < 200; ++iteration) {
    const int bars = rng.range(4, 40);
    struct Span {
      int start, end, passes;
    };
    std::vector<Span> spans;
    int cursor = 1;
    while (cursor + 1 <= bars && rng.chance(0.5)) {
      int start = cursor + rng.range(0, 2);
      int end = start + rng.range(0, 3);
      if (end > bars) break;
      spans.push_back({start, end, rng.range(1, 4)});
      cursor = end + 2;
    }
    ScoreDocument doc;
    doc.measures.resize(bars);
    for (int i = 0; i < bars; ++i) doc.measures[i].index_real = i + 1;
    for (const auto& s : spans) {
      doc.measures[s.start - 1].repeat_start = true;
      doc.measures[s.end - 1].repeat_end = s.passes;
    }

    // direct expansion: append extra passes right after a span's first pass
    std::vector<int> expected;
    for (int bar = 1; bar <= bars; ++bar) {
      expected.push_back(bar);
      for (const auto& s : spans)
        if (bar == s.end)
          for (int pass = 1; pass < s.passes; ++pass)
            for (int b = s.start; b <= s.end; ++b) expected.push_back(b);
    }

    PlaybackMap map = expand_repeats(doc);
    CAPTURE(iteration);
    CHECK(map.order == expected);
    CHECK(map.order.size() >= static_cast<size_t>(bars));
    for (int bar = 1; bar <= bars; ++bar) {
      auto it = map.real_to_offset.find(bar);
      REQUIRE(it != map.real_to_offset.end());
      CHECK(!it->second.empty());
      for (int position : it->second) CHECK(map.order[position - 1] == bar);
    }
  }
}

TEST_CASE("unbalanced backward repeat warns and still expands") {
  ScoreDocument doc;
  doc.measures.resize(4);
  for (int i = 0; i < 4; ++i) doc.measures[i].index_real = i + 1;
  doc.measures[1].repeat_end = 2;  // closes a span that implicitly opens at bar 1
  doc.measures[3].repeat_end = 2;  // no opening after the previous span
  Audit audit;
  PlaybackMap map = expand_repeats(doc, &audit);
  CHECK(map.order == std::vector<int>{1, 2, 1, 2, 3, 4, 3, 4});
  REQUIRE(audit.size() == 1);
  CHECK(audit[0].code == "UnbalancedRepeat");
}

TEST_CASE("time_of_bar integrates the tempo map") {
  Song song;
  song.ticks_per_quarter = 480;
  song.tempo_map.push_back({0, 500000});
  song.time_signatures.push_back({0, 4, 4});
  song.key_signatures.push_back({0, {}});

  SUBCASE("constant 120 BPM") {
    CHECK(time_of_bar(song, 1) == doctest::Approx(0.0));
    CHECK(time_of_bar(song, 2) == doctest::Approx(2.0));
  }
  SUBCASE("slow-down to 60 BPM at bar 2") {
    song.tempo_map.push_back({4 * 480, 1000000});
    CHECK(time_of_bar(song, 2) == doctest::Approx(2.0));
    CHECK(time_of_bar(song, 3) == doctest::Approx(6.0));
  }
  SUBCASE("strictly increasing in bar index") {
    song.tempo_map.push_back({4 * 480, 250000});
    double previous = -1.0;
    for (int bar = 1; bar <= 12; ++bar) {
      double t = time_of_bar(song, bar);
      CHECK(t > previous);
      previous = t;
    }
  }
  CHECK_THROWS_AS(time_of_bar(song, 0), MedleyError);
}

TEST_CASE("bar grid handles signature changes") {
  Song song;
  song.ticks_per_quarter = 480;
  song.tempo_map.push_back({0, 500000});
  song.time_signatures.push_back({0, 4, 4});
  song.time_signatures.push_back({2 * 1920, 3, 4});  // bars 3+ are 3/4
  song.key_signatures.push_back({0, {}});
  BarGrid grid(song);
  CHECK(grid.bar_start_tick(1) == 0);
  CHECK(grid.bar_start_tick(2) == 1920);
  CHECK(grid.bar_start_tick(3) == 3840);
  CHECK(grid.bar_start_tick(4) == 3840 + 1440);
  CHECK(grid.bar_of_tick(3840 + 1439) == 3);
  CHECK(grid.bar_of_tick(3840 + 1440) == 4);
}

TEST_SUITE_END();
