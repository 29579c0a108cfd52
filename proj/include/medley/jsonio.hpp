#pragma once

#include <string>

#include "medley/core.hpp"
#include "medley/extract.hpp"
#include "medley/metrics.hpp"

namespace medley {

std::string tp_to_json(const TransitionPoint& tp);
TransitionPoint tp_from_json(const std::string& line);

std::vector<TransitionPoint> read_tp_jsonl(const std::string& path);
void write_tp_jsonl(const std::string& path, const std::vector<TransitionPoint>& tps);

std::string metric_report_to_json(const MetricReport& report);

std::string confusion_to_json(const ConfusionMatrix& matrix);
ConfusionMatrix confusion_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace medley
