#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "io_util.hpp"
#include "series.hpp"

namespace skna {

// A multi-channel recording; all channels share the sample rate and length.
struct Recording {
  std::string participant_id;
  double rate = 0.0;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;

  std::size_t n_samples() const noexcept { return channels.empty() ? 0 : channels[0].size(); }
  double duration_s() const noexcept {
    return rate > 0.0 ? static_cast<double>(n_samples()) / rate : 0.0;
  }
  SampleSeries channel(std::size_t idx) const {
    if (idx >= channels.size()) throw ConfigError("Recording: channel index out of range");
    return SampleSeries{channels[idx], rate};
  }
};

enum class TaskLabel { Baseline, VM, ST, TG };

inline const char* to_string(TaskLabel t) {
  switch (t) {
    case TaskLabel::Baseline: return "BASELINE";
    case TaskLabel::VM: return "VM";
    case TaskLabel::ST: return "ST";
    case TaskLabel::TG: return "TG";
  }
  return "?";
}

inline TaskLabel task_label_from(std::string_view s) {
  if (s == "BASELINE") return TaskLabel::Baseline;
  if (s == "VM") return TaskLabel::VM;
  if (s == "ST") return TaskLabel::ST;
  if (s == "TG") return TaskLabel::TG;
  throw FormatError("unknown task label '" + std::string(s) + "'");
}

// Standard segment length for each task (seconds).
inline double default_duration_s(TaskLabel t) {
  switch (t) {
    case TaskLabel::VM: return 30.0;
    case TaskLabel::ST: return 120.0;
    case TaskLabel::TG: return 10.0;
    case TaskLabel::Baseline: return 30.0;
  }
  return 0.0;
}

// One annotated window.  `vas` is present exactly for TG (pain) segments.
struct SegmentAnnotation {
  TaskLabel label = TaskLabel::Baseline;
  double start_s = 0.0;
  double duration_s = 0.0;
  std::optional<double> vas;

  double end_s() const noexcept { return start_s + duration_s; }
};

inline void validate_annotation(const SegmentAnnotation& a) {
  if (!(a.start_s >= 0.0) || !std::isfinite(a.start_s)) {
    throw DataError("annotation: start must be non-negative");
  }
  if (!(a.duration_s > 0.0) || !std::isfinite(a.duration_s)) {
    throw DataError("annotation: duration must be positive");
  }
  if (a.label == TaskLabel::TG) {
    if (!a.vas.has_value()) throw DataError("annotation: TG segment requires a VAS score");
    if (!(*a.vas >= 0.0 && *a.vas <= 10.0)) {
      throw DataError("annotation: VAS must lie in [0, 10]");
    }
  } else if (a.vas.has_value()) {
    throw DataError("annotation: VAS only applies to TG segments");
  }
}

namespace recording_detail {

struct Header {
  double rate = 0.0;
  std::vector<std::string> names;
};

// Parses "rate=<float>;channels=<name>[,<name>...]".
inline Header parse_header(std::string_view line, const std::string& where) {
  auto parts = split_view(trim_view(line), ';');
  if (parts.size() != 2) {
    throw FormatError(where + ": header must be 'rate=<hz>;channels=<names>'");
  }
  auto rate_part = trim_view(parts[0]);
  auto chan_part = trim_view(parts[1]);
  if (!rate_part.starts_with("rate=") || !chan_part.starts_with("channels=")) {
    throw FormatError(where + ": header must declare rate= and channels=");
  }
  Header h;
  h.rate = parse_double_strict(rate_part.substr(5), where + " header rate");
  if (!(h.rate > 0.0) || !std::isfinite(h.rate)) {
    throw FormatError(where + ": sample rate must be positive");
  }
  for (auto name : split_view(chan_part.substr(9), ',')) {
    auto trimmed = trim_view(name);
    if (trimmed.empty()) throw FormatError(where + ": empty channel name");
    h.names.emplace_back(trimmed);
  }
  if (h.names.empty()) throw FormatError(where + ": no channels declared");
  return h;
}

inline std::string make_header(const Recording& rec) {
  std::string line = "rate=" + format_double(rec.rate) + ";channels=";
  for (std::size_t i = 0; i < rec.channel_names.size(); ++i) {
    if (i) line += ',';
    line += rec.channel_names[i];
  }
  return line;
}

template <typename T>
void read_raw(std::istream& in, T* out, std::size_t count, const std::string& where) {
  in.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw FormatError(where + ": truncated binary payload");
}

}  // namespace recording_detail

inline void validate_recording(const Recording& rec) {
  if (!(rec.rate > 0.0) || !std::isfinite(rec.rate)) {
    throw FormatError("recording: sample rate must be positive");
  }
  if (rec.channels.empty() || rec.channels.size() != rec.channel_names.size()) {
    throw FormatError("recording: channel data and names disagree");
  }
  const std::size_t n = rec.channels[0].size();
  if (n == 0) throw FormatError("recording: channels hold no samples");
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    if (rec.channels[c].size() != n) {
      throw DataError("recording: channels have unequal lengths");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(rec.channels[c][i])) {
        throw DataError("recording: non-finite sample in channel " + rec.channel_names[c],
                        static_cast<std::ptrdiff_t>(i));
      }
    }
  }
}

// ---- CSV recording format -------------------------------------------------
//
//   rate=10000;channels=ch1,ch2
//   0.01,0.02
//   ...
//
// One row per sample, one column per channel, full-precision floats.

inline Recording load_recording_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open recording: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  auto header = recording_detail::parse_header(line, path.string());

  Recording rec;
  rec.participant_id = path.stem().string();
  rec.rate = header.rate;
  rec.channel_names = header.names;
  rec.channels.assign(header.names.size(), {});

  std::ptrdiff_t row = 0;
  while (std::getline(in, line)) {
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    auto fields = split_view(sv, ',');
    if (fields.size() != rec.channels.size()) {
      throw DataError(path.string() + ": row has " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(rec.channels.size()),
                      row);
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      try {
        v = parse_double_strict(fields[c], path.string() + " sample");
      } catch (const FormatError&) {
        throw DataError(path.string() + ": unparsable sample value", row);
      }
      if (!std::isfinite(v)) {
        throw DataError(path.string() + ": non-finite sample value", row);
      }
      rec.channels[c].push_back(v);
    }
    ++row;
  }
  if (rec.n_samples() == 0) throw FormatError(path.string() + ": no sample rows");
  return rec;
}

inline void save_recording_csv(const std::filesystem::path& path, const Recording& rec) {
  validate_recording(rec);
  std::string out;
  out.reserve(rec.n_samples() * rec.channels.size() * 12 + 64);
  out += recording_detail::make_header(rec);
  out += '\n';
  const std::size_t n = rec.n_samples();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      if (c) out += ',';
      out += format_double(rec.channels[c][i]);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

// ---- Raw binary recording format -------------------------------------------
//
// Payload: u64 n_channels, u64 n_samples, then channel-major little-endian
// doubles.  Rate and channel names live in a `<file>.meta` sidecar holding the
// same header line as the CSV format.

inline void save_recording_binary(const std::filesystem::path& path, const Recording& rec) {
  validate_recording(rec);
  std::string out;
  const std::uint64_t nch = rec.channels.size();
  const std::uint64_t ns = rec.n_samples();
  out.resize(16 + nch * ns * sizeof(double));
  std::memcpy(out.data(), &nch, 8);
  std::memcpy(out.data() + 8, &ns, 8);
  char* p = out.data() + 16;
  for (const auto& ch : rec.channels) {
    std::memcpy(p, ch.data(), ns * sizeof(double));
    p += ns * sizeof(double);
  }
  write_file_atomic(path, out);
  std::filesystem::path meta = path;
  meta += ".meta";
  write_file_atomic(meta, recording_detail::make_header(rec) + "\n");
}

inline Recording load_recording_binary(const std::filesystem::path& path) {
  std::filesystem::path meta = path;
  meta += ".meta";
  if (!std::filesystem::exists(meta)) {
    throw FormatError(path.string() + ": missing sidecar descriptor " + meta.string());
  }
  auto header = recording_detail::parse_header(read_text_file(meta), meta.string());

  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open recording: " + path.string());
  std::uint64_t nch = 0, ns = 0;
  recording_detail::read_raw(in, &nch, 1, path.string());
  recording_detail::read_raw(in, &ns, 1, path.string());
  if (nch != header.names.size()) {
    throw FormatError(path.string() + ": channel count disagrees with sidecar");
  }
  if (nch == 0 || ns == 0) throw FormatError(path.string() + ": empty recording");
  if (nch > 1024 || ns > (1ull << 40)) throw FormatError(path.string() + ": implausible sizes");

  Recording rec;
  rec.participant_id = path.stem().string();
  rec.rate = header.rate;
  rec.channel_names = header.names;
  rec.channels.assign(nch, std::vector<double>(ns));
  for (auto& ch : rec.channels) {
    recording_detail::read_raw(in, ch.data(), ns, path.string());
  }
  validate_recording(rec);
  return rec;
}

// Loads by extension: `.csv` is the text format, anything else is binary.
inline Recording load_recording(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return load_recording_csv(path);
  return load_recording_binary(path);
}

// ---- Annotations ------------------------------------------------------------
//
//   label,start_s,duration_s,vas
//   VM,36,30,
//   TG,402,10,2.5

inline std::vector<SegmentAnnotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open annotations: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  if (trim_view(line) != "label,start_s,duration_s,vas") {
    throw FormatError(path.string() + ": bad annotation header");
  }
  std::vector<SegmentAnnotation> out;
  while (std::getline(in, line)) {
    std::string_view sv = trim_view(line);
    if (sv.empty()) continue;
    auto fields = split_view(sv, ',');
    if (fields.size() != 4) {
      throw FormatError(path.string() + ": annotation rows need 4 fields");
    }
    SegmentAnnotation a;
    a.label = task_label_from(trim_view(fields[0]));
    a.start_s = parse_double_strict(fields[1], path.string() + " start_s");
    a.duration_s = parse_double_strict(fields[2], path.string() + " duration_s");
    auto vas_field = trim_view(fields[3]);
    if (!vas_field.empty()) a.vas = parse_double_strict(vas_field, path.string() + " vas");
    try {
      validate_annotation(a);
    } catch (const DataError& e) {
      // In a file context a bad row is a format problem, not a data problem.
      throw FormatError(path.string() + ": " + e.what());
    }
    out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SegmentAnnotation& a, const SegmentAnnotation& b) {
                     return a.start_s < b.start_s;
                   });
  return out;
}

inline void save_annotations(const std::filesystem::path& path,
                             const std::vector<SegmentAnnotation>& annotations) {
  std::string out = "label,start_s,duration_s,vas\n";
  for (const auto& a : annotations) {
    validate_annotation(a);
    out += to_string(a.label);
    out += ',';
    out += format_double(a.start_s);
    out += ',';
    out += format_double(a.duration_s);
    out += ',';
    if (a.vas.has_value()) out += format_double(*a.vas);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace skna
