#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "swapsim/protocol.hpp"

namespace swapsim {

/// Column order of the flat record schema, shared by the CSV and JSON-lines
/// emitters. Identical inputs produce byte-identical files.
inline constexpr const char* kRecordCsvHeader =
    "trial_id,d_action,d_outcome,message_delivered,setting_pair,outcome1,outcome4";

/// One record as a single-line JSON object with fixed key order. The values
/// this schema carries (labels like "psi-" or "01") need no escaping.
inline std::string record_to_json_line(const TrialRecord& record) {
  std::string line = "{\"trial_id\":";
  line += std::to_string(record.trial_id);
  line += ",\"d_action\":\"";
  line += to_string(record.d_action);
  line += "\",\"d_outcome\":";
  if (record.d_outcome.has_value()) {
    line += '"';
    line += *record.d_outcome;
    line += '"';
  } else {
    line += "null";
  }
  line += ",\"message_delivered\":";
  line += record.message_delivered ? "true" : "false";
  line += ",\"setting_pair\":";
  line += std::to_string(record.setting_pair);
  line += ",\"outcome1\":";
  line += std::to_string(record.outcome1);
  line += ",\"outcome4\":";
  line += std::to_string(record.outcome4);
  line += '}';
  return line;
}

/// One record as a CSV row matching kRecordCsvHeader; an absent d_outcome is
/// an empty field.
inline std::string record_to_csv_line(const TrialRecord& record) {
  std::string line = std::to_string(record.trial_id);
  line += ',';
  line += to_string(record.d_action);
  line += ',';
  if (record.d_outcome.has_value()) line += *record.d_outcome;
  line += ',';
  line += record.message_delivered ? "true" : "false";
  line += ',';
  line += std::to_string(record.setting_pair);
  line += ',';
  line += std::to_string(record.outcome1);
  line += ',';
  line += std::to_string(record.outcome4);
  return line;
}

inline void write_records_jsonl(const std::vector<TrialRecord>& records, std::ostream& out) {
  for (const TrialRecord& record : records) out << record_to_json_line(record) << '\n';
}

inline void write_records_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << kRecordCsvHeader << '\n';
  for (const TrialRecord& record : records) out << record_to_csv_line(record) << '\n';
}

}  // namespace swapsim
