#include "medcheck/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace medcheck {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

// Parses "id", "sep", "text" out of one trimmed line.
Sentence parse_line(const std::string& note_id, const std::string& line,
                    std::size_t line_no, SeparatorPolicy policy) {
  std::size_t digits_end = 0;
  while (digits_end < line.size() &&
         std::isdigit(static_cast<unsigned char>(line[digits_end]))) {
    ++digits_end;
  }
  if (digits_end == 0) {
    throw MalformedLine("note " + note_id + " line " + std::to_string(line_no) +
                        ": no leading sentence id");
  }
  int id = 0;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + digits_end, id);
  if (ec != std::errc{} || ptr != line.data() + digits_end) {
    throw MalformedLine("note " + note_id + " line " + std::to_string(line_no) +
                        ": sentence id out of range");
  }

  std::size_t text_start = 0;
  const bool has_pipe = digits_end < line.size() && line[digits_end] == '|';
  const bool has_space =
      digits_end < line.size() &&
      std::isspace(static_cast<unsigned char>(line[digits_end]));
  switch (policy) {
    case SeparatorPolicy::pipe:
      if (!has_pipe) {
        throw MalformedLine("note " + note_id + " line " +
                            std::to_string(line_no) +
                            ": expected '|' after sentence id");
      }
      text_start = digits_end + 1;
      break;
    case SeparatorPolicy::whitespace:
      if (!has_space) {
        throw MalformedLine("note " + note_id + " line " +
                            std::to_string(line_no) +
                            ": expected whitespace after sentence id");
      }
      text_start = digits_end;
      while (text_start < line.size() &&
             std::isspace(static_cast<unsigned char>(line[text_start]))) {
        ++text_start;
      }
      break;
    case SeparatorPolicy::auto_detect:
      if (has_pipe) {
        text_start = digits_end + 1;
      } else if (has_space) {
        text_start = digits_end;
        while (text_start < line.size() &&
               std::isspace(static_cast<unsigned char>(line[text_start]))) {
          ++text_start;
        }
      } else {
        throw MalformedLine("note " + note_id + " line " +
                            std::to_string(line_no) +
                            ": no separator after sentence id");
      }
      break;
  }

  std::string text = trim(std::string_view(line).substr(text_start));
  if (text.empty()) {
    throw MalformedLine("note " + note_id + " line " + std::to_string(line_no) +
                        ": empty sentence text");
  }
  return Sentence{id, std::move(text)};
}

}  // namespace

const Sentence* ClinicalNote::find_sentence(int id) const {
  for (const auto& s : sentences) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

ClinicalNote parse_note(const std::string& note_id, const std::string& raw_text,
                        SeparatorPolicy policy) {
  ClinicalNote note;
  note.note_id = note_id;
  std::size_t line_no = 0;
  for (const auto& raw_line : split_lines(raw_text)) {
    ++line_no;
    std::string line = trim(raw_line);
    if (line.empty()) continue;  // display artifact, not content
    Sentence s = parse_line(note_id, line, line_no, policy);
    if (!note.sentences.empty()) {
      const int last = note.sentences.back().id;
      if (s.id == last) {
        throw DuplicateSentenceId("note " + note_id + ": duplicate sentence id " +
                                  std::to_string(s.id));
      }
      if (s.id < last) {
        throw NonMonotonicIds("note " + note_id + ": sentence id " +
                              std::to_string(s.id) + " after " +
                              std::to_string(last));
      }
    }
    note.sentences.push_back(std::move(s));
  }
  if (note.sentences.empty()) {
    throw MalformedLine("note " + note_id + ": no sentences");
  }
  return note;
}

std::string render_note(const ClinicalNote& note) {
  std::string out;
  for (std::size_t i = 0; i < note.sentences.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(note.sentences[i].id);
    out += '|';
    out += note.sentences[i].text;
  }
  return out;
}

void validate_ground_truth(const ClinicalNote& note, const GroundTruth& gt) {
  if (gt.has_error) {
    if (!gt.error_sentence_id.has_value()) {
      throw InvariantViolation("note " + note.note_id +
                               ": has_error set but no error sentence id");
    }
    if (!gt.corrected_sentence.has_value() || gt.corrected_sentence->empty()) {
      throw InvariantViolation("note " + note.note_id +
                               ": has_error set but no corrected sentence");
    }
    if (note.find_sentence(*gt.error_sentence_id) == nullptr) {
      throw InvariantViolation(
          "note " + note.note_id + ": error sentence id " +
          std::to_string(*gt.error_sentence_id) + " not present in note");
    }
  } else {
    if (gt.error_sentence_id.has_value() || gt.corrected_sentence.has_value()) {
      throw InvariantViolation("note " + note.note_id +
                               ": error fields present on an error-free note");
    }
  }
}

namespace {

using nlohmann::json;

bool is_absent(const std::string& cell, const ColumnMapping& m) {
  return std::find(m.absent_markers.begin(), m.absent_markers.end(), cell) !=
         m.absent_markers.end();
}

bool parse_flag(const std::string& raw, const std::string& row_id) {
  std::string v;
  for (char c : raw) v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw InvariantViolation("row " + row_id + ": unparseable error flag '" + raw +
                           "'");
}

int parse_int_cell(const std::string& raw, const std::string& row_id) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
    throw InvariantViolation("row " + row_id + ": unparseable sentence id '" +
                             raw + "'");
  }
  return v;
}

std::pair<ClinicalNote, GroundTruth> row_from_fields(
    const std::string& note_id, const std::string& text,
    const std::optional<std::string>& flag_raw,
    const std::optional<int>& err_id,
    const std::optional<std::string>& corrected, const ColumnMapping& mapping,
    const std::string& row_id) {
  if (!flag_raw.has_value()) {
    throw SchemaError("row " + row_id + ": missing error flag");
  }
  GroundTruth gt;
  gt.has_error = parse_flag(*flag_raw, row_id);
  gt.error_sentence_id = err_id;
  gt.corrected_sentence = corrected;
  ClinicalNote note;
  try {
    note = parse_note(note_id, text, mapping.separator_policy);
  } catch (const Error& e) {
    throw InvariantViolation("row " + row_id + ": " + e.what());
  }
  try {
    validate_ground_truth(note, gt);
  } catch (const InvariantViolation& e) {
    throw InvariantViolation("row " + row_id + ": " + e.what());
  }
  return {std::move(note), std::move(gt)};
}

std::pair<ClinicalNote, GroundTruth> row_from_json(const json& row,
                                                   const ColumnMapping& m,
                                                   const std::string& row_id) {
  for (const std::string* col : {&m.note_id, &m.text, &m.has_error}) {
    if (!row.contains(*col)) {
      throw SchemaError("row " + row_id + ": missing field '" + *col + "'");
    }
  }
  const json& idv = row.at(m.note_id);
  std::string note_id = idv.is_string() ? idv.get<std::string>() : idv.dump();
  std::string text = row.at(m.text).get<std::string>();

  const json& flag = row.at(m.has_error);
  std::string flag_raw;
  if (flag.is_boolean()) {
    flag_raw = flag.get<bool>() ? "true" : "false";
  } else if (flag.is_number()) {
    flag_raw = std::to_string(flag.get<long long>());
  } else if (flag.is_string()) {
    flag_raw = flag.get<std::string>();
  } else {
    throw InvariantViolation("row " + row_id + ": unparseable error flag");
  }

  std::optional<int> err_id;
  if (row.contains(m.error_sentence_id) && !row.at(m.error_sentence_id).is_null()) {
    const json& v = row.at(m.error_sentence_id);
    if (v.is_number_integer()) {
      err_id = v.get<int>();
    } else if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (!is_absent(s, m)) err_id = parse_int_cell(s, row_id);
    } else {
      throw InvariantViolation("row " + row_id + ": unparseable sentence id");
    }
    if (err_id.has_value() && *err_id < 0) err_id.reset();  // -1 marker
  }

  std::optional<std::string> corrected;
  if (row.contains(m.corrected_sentence) && !row.at(m.corrected_sentence).is_null()) {
    std::string s = row.at(m.corrected_sentence).get<std::string>();
    if (!is_absent(s, m)) corrected = std::move(s);
  }

  return row_from_fields(note_id, text, flag_raw, err_id, corrected, m, row_id);
}

Dataset load_jsonl(std::istream& in, const ColumnMapping& m,
                   const std::string& name) {
  Dataset ds;
  ds.name = name;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
    }
    ds.items.push_back(row_from_json(row, m, std::to_string(line_no)));
  }
  return ds;
}

// Minimal RFC4180-style row reader: quoted fields, "" escapes, embedded
// newlines inside quotes.
std::optional<std::vector<std::string>> read_delimited_row(std::istream& in,
                                                           char delim) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == delim) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return fields;
    } else {
      field += ch;
    }
  }
  if (!any) return std::nullopt;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  return fields;
}

Dataset load_delimited(std::istream& in, const ColumnMapping& m,
                       const std::string& name) {
  auto header = read_delimited_row(in, m.delimiter);
  if (!header.has_value()) {
    return Dataset{name, {}};  // empty file, zero items
  }
  auto col_index = [&](const std::string& col) -> std::size_t {
    auto it = std::find(header->begin(), header->end(), col);
    if (it == header->end()) {
      throw SchemaError("missing column '" + col + "'");
    }
    return static_cast<std::size_t>(it - header->begin());
  };
  const std::size_t c_id = col_index(m.note_id);
  const std::size_t c_text = col_index(m.text);
  const std::size_t c_flag = col_index(m.has_error);
  const std::size_t c_err = col_index(m.error_sentence_id);
  const std::size_t c_fix = col_index(m.corrected_sentence);

  Dataset ds;
  ds.name = name;
  std::size_t row_no = 1;
  while (auto row = read_delimited_row(in, m.delimiter)) {
    ++row_no;
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;
    const std::string row_id = std::to_string(row_no);
    if (row->size() != header->size()) {
      throw SchemaError("row " + row_id + ": expected " +
                        std::to_string(header->size()) + " fields, got " +
                        std::to_string(row->size()));
    }
    std::optional<int> err_id;
    if (!is_absent((*row)[c_err], m)) err_id = parse_int_cell((*row)[c_err], row_id);
    std::optional<std::string> corrected;
    if (!is_absent((*row)[c_fix], m)) corrected = (*row)[c_fix];
    ds.items.push_back(row_from_fields((*row)[c_id], (*row)[c_text],
                                       (*row)[c_flag], err_id, corrected, m,
                                       row_id));
  }
  return ds;
}

}  // namespace

Dataset load_split(const std::filesystem::path& path,
                   const ColumnMapping& mapping, const std::string& split_name) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw IoError("no such file: " + path.string());
  }
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open: " + path.string());
  }
  const std::string name = split_name.empty() ? path.stem().string() : split_name;

  FileFormat fmt = mapping.format;
  if (fmt == FileFormat::auto_detect) {
    const std::string ext = path.extension().string();
    fmt = (ext == ".jsonl" || ext == ".ndjson") ? FileFormat::jsonl
                                                : FileFormat::delimited;
  }
  Dataset ds = fmt == FileFormat::jsonl ? load_jsonl(in, mapping, name)
                                        : load_delimited(in, mapping, name);

  std::unordered_set<std::string> seen;
  for (const auto& [note, gt] : ds.items) {
    if (!seen.insert(note.note_id).second) {
      throw InvariantViolation("split " + name + ": duplicate note id '" +
                               note.note_id + "'");
    }
  }
  return ds;
}

SplitSummary split_summary(const Dataset& ds) {
  SplitSummary s;
  s.n_total = ds.items.size();
  for (const auto& [note, gt] : ds.items) {
    if (gt.has_error) {
      ++s.n_error;
    } else {
      ++s.n_correct;
    }
  }
  return s;
}

}  // namespace medcheck
