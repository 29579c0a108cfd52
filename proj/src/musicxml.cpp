#include "medley/musicxml.hpp"

#include <algorithm>
#include <cctype>

#include "medley/xml.hpp"
#include "medley/zip.hpp"

namespace medley {

namespace {

std::string trimmed(const std::string& s) {
  size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

Placement placement_of(const xml::Node& direction) {
  auto p = direction.attribute("placement");
  if (!p) return Placement::Unspecified;
  if (*p == "above") return Placement::Above;
  if (*p == "below") return Placement::Below;
  return Placement::Unspecified;
}

void collect_measure(const xml::Node& measure_node, Measure& measure, Audit* audit) {
  for (const auto& child : measure_node.children) {
    if (child.name == "direction") {
      Placement placement = placement_of(child);
      for (const auto* dt : child.children_named("direction-type")) {
        for (const auto& leaf : dt->children) {
          if (leaf.name == "segno" || leaf.name == "coda") {
            audit_note(audit, "UnsupportedRepeatForm",
                       "<" + leaf.name + "> at bar " + std::to_string(measure.index_real) +
                           " ignored; only forward/backward repeats are expanded");
            continue;
          }
          if (leaf.name != "words" && leaf.name != "rehearsal") continue;
          std::string text = trimmed(leaf.text);
          if (!text.empty()) measure.annotations.push_back({text, placement});
        }
      }
    } else if (child.name == "attributes") {
      if (const auto* time = child.child("time")) {
        const auto* beats = time->child("beats");
        const auto* beat_type = time->child("beat-type");
        if (beats && beat_type) {
          try {
            measure.time_signature = {std::stoi(trimmed(beats->text)),
                                      std::stoi(trimmed(beat_type->text))};
          } catch (const std::exception&) {
            throw MedleyError(Errc::XmlSyntax, "non-numeric time signature");
          }
        }
      }
    } else if (child.name == "barline") {
      if (child.child("ending")) {
        audit_note(audit, "UnsupportedRepeatForm",
                   "volta ending at bar " + std::to_string(measure.index_real) +
                       " ignored; only forward/backward repeats are expanded");
      }
      if (const auto* repeat = child.child("repeat")) {
        auto direction = repeat->attribute("direction").value_or("");
        if (direction == "forward") {
          measure.repeat_start = true;
        } else if (direction == "backward") {
          int times = 2;  // default: span played twice
          if (auto t = repeat->attribute("times")) {
            try {
              times = std::max(1, std::stoi(*t));
            } catch (const std::exception&) {
              times = 2;
            }
          }
          measure.repeat_end = times;
        }
      }
    }
  }
}

ScoreDocument from_partwise(const xml::Node& root, Audit* audit) {
  ScoreDocument doc;
  if (const auto* work = root.child("work"))
    if (const auto* title = work->child("work-title")) doc.title = trimmed(title->text);
  if (doc.title.empty())
    if (const auto* title = root.child("movement-title")) doc.title = trimmed(title->text);

  auto parts = root.children_named("part");
  for (const auto* part : parts)
    doc.parts.push_back(part->attribute("id").value_or(""));

  size_t measure_count = 0;
  for (const auto* part : parts)
    measure_count = std::max(measure_count, part->children_named("measure").size());
  doc.measures.resize(measure_count);
  for (size_t i = 0; i < measure_count; ++i) doc.measures[i].index_real = static_cast<int>(i) + 1;

  for (const auto* part : parts) {
    auto measures = part->children_named("measure");
    for (size_t i = 0; i < measures.size(); ++i) {
      Measure scratch;
      scratch.index_real = static_cast<int>(i) + 1;
      collect_measure(*measures[i], scratch, audit);
      Measure& target = doc.measures[i];
      for (auto& a : scratch.annotations) target.annotations.push_back(std::move(a));
      if (!target.time_signature && scratch.time_signature)
        target.time_signature = scratch.time_signature;
      if (scratch.repeat_start) target.repeat_start = true;
      if (!target.repeat_end && scratch.repeat_end) target.repeat_end = scratch.repeat_end;
    }
  }
  return doc;
}

ScoreDocument from_timewise(const xml::Node& root, Audit* audit) {
  ScoreDocument doc;
  if (const auto* work = root.child("work"))
    if (const auto* title = work->child("work-title")) doc.title = trimmed(title->text);

  auto measures = root.children_named("measure");
  doc.measures.resize(measures.size());
  for (size_t i = 0; i < measures.size(); ++i) {
    doc.measures[i].index_real = static_cast<int>(i) + 1;
    for (const auto* part : measures[i]->children_named("part")) {
      Measure scratch;
      scratch.index_real = static_cast<int>(i) + 1;
      collect_measure(*part, scratch, audit);
      Measure& target = doc.measures[i];
      for (auto& a : scratch.annotations) target.annotations.push_back(std::move(a));
      if (!target.time_signature && scratch.time_signature)
        target.time_signature = scratch.time_signature;
      if (scratch.repeat_start) target.repeat_start = true;
      if (!target.repeat_end && scratch.repeat_end) target.repeat_end = scratch.repeat_end;
      if (i == 0) doc.parts.push_back(part->attribute("id").value_or(""));
    }
  }
  return doc;
}

bool looks_like_xml(std::string_view bytes) {
  size_t i = 0;
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  return i < bytes.size() && bytes[i] == '<';
}

std::string resolve_container(std::string_view archive, Audit* audit) {
  std::string manifest;
  try {
    manifest = zip::read_entry(archive, "META-INF/container.xml");
  } catch (const MedleyError&) {
    throw MedleyError(Errc::MissingContainerRootfile, "archive has no META-INF/container.xml");
  }
  xml::Node container = xml::parse(manifest);
  const auto* rootfiles = container.child("rootfiles");
  const xml::Node* rootfile = rootfiles ? rootfiles->child("rootfile") : nullptr;
  auto path = rootfile ? rootfile->attribute("full-path") : std::nullopt;
  if (!path || path->empty())
    throw MedleyError(Errc::MissingContainerRootfile, "container.xml names no rootfile");
  (void)audit;
  return zip::read_entry(archive, *path);
}

}  // namespace

ScoreDocument parse_mxl(std::string_view bytes, Audit* audit) {
  std::string payload;
  std::string_view document = bytes;
  if (zip::looks_like_zip(bytes)) {
    payload = resolve_container(bytes, audit);
    document = payload;
  } else if (!looks_like_xml(bytes)) {
    throw MedleyError(Errc::NotAZipOrXml, "input is neither a ZIP archive nor an XML document");
  }

  xml::Node root = xml::parse(document);
  if (root.name == "score-partwise") return from_partwise(root, audit);
  if (root.name == "score-timewise") return from_timewise(root, audit);
  throw MedleyError(Errc::XmlSyntax, "unexpected root element <" + root.name + ">");
}

}  // namespace medley
